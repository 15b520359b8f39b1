#pragma once

#include <random>
#include <set>
#include <vector>

#include "nilext/abgroup.hpp"
#include "nilext/polymap.hpp"

namespace nilext::testing {

using Rng = std::mt19937_64;

inline Int uniform(Rng& rng, Int lo, Int hi) { return std::uniform_int_distribution<Int>(lo, hi)(rng); }

inline Rational random_rational(Rng& rng, Int max_den, Int max_num = 20) {
  return Rational(uniform(rng, -max_num, max_num), uniform(rng, 1, max_den));
}

// All elements of the subgroup generated by gens, by closure.
inline std::set<std::vector<Int>> generated_set(const FinAbGroup& amb, const std::vector<std::vector<Int>>& gens) {
  std::set<std::vector<Int>> seen{std::vector<Int>(amb.rank(), 0)};
  std::vector<std::vector<Int>> frontier(seen.begin(), seen.end());
  while (!frontier.empty()) {
    std::vector<std::vector<Int>> next;
    for (const auto& x : frontier)
      for (const auto& g : gens) {
        auto y = amb.add(x, amb.reduce(g));
        if (seen.insert(y).second) next.push_back(y);
      }
    frontier = std::move(next);
  }
  return seen;
}

inline std::set<std::vector<Int>> image_set(const SubgroupEmbedding& e) {
  std::set<std::vector<Int>> out;
  e.sub.for_each_element([&](const std::vector<Int>& y) { out.insert(e.apply(y)); });
  return out;
}

// Random group of the given rank with order at most max_order.
inline FinAbGroup random_group(Rng& rng, std::size_t max_rank, Int max_order, Int max_factor = 12) {
  for (;;) {
    std::size_t r = static_cast<std::size_t>(uniform(rng, 1, static_cast<Int>(max_rank)));
    std::vector<Int> f;
    Int order = 1;
    for (std::size_t i = 0; i < r; ++i) {
      f.push_back(uniform(rng, 2, max_factor));
      order *= f.back();
    }
    if (order <= max_order) return FinAbGroup(f);
  }
}

inline SubgroupEmbedding random_subgroup(Rng& rng, const FinAbGroup& amb, int max_gens = 3) {
  std::vector<GroupElement> gens;
  int g = static_cast<int>(uniform(rng, 0, max_gens));
  for (int i = 0; i < g; ++i) {
    GroupElement e{std::vector<Int>(amb.rank())};
    for (std::size_t j = 0; j < amb.rank(); ++j) {
      // Bias toward multiples so that proper subgroups are common.
      Int m = uniform(rng, 0, 2) == 0 ? 1 : uniform(rng, 1, 4);
      e.coords[j] = mod(m * uniform(rng, 0, amb.factor(j) - 1), amb.factor(j));
    }
    gens.push_back(e);
  }
  return subgroup_from_generators(amb, gens);
}

// Random torus-valued polynomial of degree <= k on Z^r that descends to
// prod Z_{moduli[i]}: a sum of monomials c * v_{i_1}...v_{i_j} / gcd(n_{i_1},...)
// (each periodic on its own) plus a constant with denominator <= max_den.
inline PolyMap random_phase_poly(Rng& rng, const std::vector<Int>& moduli, int k, Int max_den = 24, int terms = 4) {
  const int r = static_cast<int>(moduli.size());
  struct Mono {
    std::vector<int> vars;
    Rational c;
  };
  std::vector<Mono> monos;
  for (int t = 0; t < terms && r > 0; ++t) {
    int deg = static_cast<int>(uniform(rng, 1, k));
    Mono m;
    Int g = 0;
    for (int j = 0; j < deg; ++j) {
      int v = static_cast<int>(uniform(rng, 0, r - 1));
      m.vars.push_back(v);
      g = std::gcd(g, moduli[static_cast<std::size_t>(v)]);
    }
    m.c = Rational(uniform(rng, 0, g - 1), g);
    monos.push_back(m);
  }
  Rational constant(uniform(rng, 0, max_den - 1), uniform(rng, 1, max_den));
  auto J = MultiIndexSet::get(r, k);
  std::vector<std::vector<Rational>> vals;
  for (const auto& t : J->all()) {
    Rational v = constant;
    for (const auto& m : monos) {
      Rational term = m.c;
      for (int i : m.vars) term *= Rational(t[static_cast<std::size_t>(i)]);
      v += term;
    }
    vals.push_back({v});
  }
  return PolyMap::from_grid_values(r, k, 1, Target::torus(), vals);
}

}  // namespace nilext::testing
