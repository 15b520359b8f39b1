#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "nilext/rational.hpp"
#include "nilext/smith.hpp"

namespace nilext {

/// Finite abelian group Z_{n_1} x ... x Z_{n_r}.
///
/// Elements are integer coordinate vectors with 0 <= x_i < n_i. The trivial
/// group has rank zero; factors equal to 1 are allowed on input but the
/// canonical decomposition drops them.
class FinAbGroup {
public:
  FinAbGroup() = default;
  explicit FinAbGroup(std::vector<Int> factors) : factors_(std::move(factors)) {
    for (Int n : factors_) require(n >= 1, "group modulus must be >= 1");
    order_ = 1;
    for (Int n : factors_) order_ = checked_mul(order_, n);
  }

  const std::vector<Int>& factors() const { return factors_; }
  std::size_t rank() const { return factors_.size(); }
  Int order() const { return order_; }
  Int factor(std::size_t i) const { return factors_[i]; }

  bool contains(const std::vector<Int>& x) const {
    if (x.size() != rank()) return false;
    for (std::size_t i = 0; i < rank(); ++i)
      if (x[i] < 0 || x[i] >= factors_[i]) return false;
    return true;
  }

  std::vector<Int> reduce(std::vector<Int> x) const {
    require(x.size() == rank(), "element rank mismatch");
    for (std::size_t i = 0; i < rank(); ++i) x[i] = mod(x[i], factors_[i]);
    return x;
  }

  std::vector<Int> add(const std::vector<Int>& a, const std::vector<Int>& b) const {
    std::vector<Int> s(rank());
    for (std::size_t i = 0; i < rank(); ++i) s[i] = mod(checked_add(a[i], b[i]), factors_[i]);
    return s;
  }
  std::vector<Int> sub(const std::vector<Int>& a, const std::vector<Int>& b) const {
    std::vector<Int> s(rank());
    for (std::size_t i = 0; i < rank(); ++i) s[i] = mod(checked_sub(a[i], b[i]), factors_[i]);
    return s;
  }

  // Row-major position: the last coordinate varies fastest.
  Int index_of(const std::vector<Int>& x) const {
    Int idx = 0;
    for (std::size_t i = 0; i < rank(); ++i) idx = idx * factors_[i] + x[i];
    return idx;
  }
  std::vector<Int> element_at(Int idx) const {
    std::vector<Int> x(rank());
    for (std::size_t i = rank(); i-- > 0;) {
      x[i] = idx % factors_[i];
      idx /= factors_[i];
    }
    return x;
  }

  template <class F>
  void for_each_element(F&& f) const {
    for (Int i = 0; i < order_; ++i) f(element_at(i));
  }

  friend bool operator==(const FinAbGroup& a, const FinAbGroup& b) { return a.factors_ == b.factors_; }

  std::string str() const {
    if (factors_.empty()) return "0";
    std::string s;
    for (std::size_t i = 0; i < rank(); ++i) s += (i ? " x Z_" : "Z_") + std::to_string(factors_[i]);
    return s;
  }

private:
  std::vector<Int> factors_;
  Int order_ = 1;
};

struct GroupElement {
  std::vector<Int> coords;
  friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

/// Result of canonical_decomposition.
///
/// `to_canonical` maps input coordinates (as a column vector) to canonical
/// coordinates, reduced mod the invariant factors; `from_canonical` goes back.
struct CanonicalDecomposition {
  FinAbGroup group;                       // invariant factors d_1 | d_2 | ...
  std::map<Int, std::vector<int>> primary;  // prime -> sorted exponents
  IntMatrix to_canonical;
  IntMatrix from_canonical;
};

namespace detail {

inline std::vector<std::pair<Int, int>> factorize(Int n) {
  std::vector<std::pair<Int, int>> out;
  for (Int p = 2; p * p <= n; ++p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

inline Int exponent(const FinAbGroup& g) {
  Int N = 1;
  for (Int f : g.factors()) N = lcm(N, f);
  return N;
}

inline Int ipow(Int b, int e) {
  Int r = 1;
  while (e-- > 0) r = checked_mul(r, b);
  return r;
}

}  // namespace detail

/// Canonical form of Z^n / (row span of `relations`).
///
/// `exponent`, when positive, must annihilate the group (N Z^n inside the
/// relation lattice); the coordinate maps are then computed modulo N.
inline CanonicalDecomposition canonical_decomposition(const IntMatrix& relations, Int exponent = 0) {
  const std::size_t n = relations.cols();
  SmithForm s = smith_normal_form(relations, false, exponent);
  if (s.rank < n) throw PreconditionError("relations do not define a finite group");
  // x (row) -> x V sends the relation lattice onto the diagonal lattice.
  IntMatrix Vt = s.V.transpose();
  IntMatrix Vinv_t = s.V_inv.transpose();
  std::vector<std::size_t> keep;
  std::vector<Int> inv;
  for (std::size_t i = 0; i < n; ++i)
    if (s.diag(i) > 1) {
      keep.push_back(i);
      inv.push_back(s.diag(i));
    }
  CanonicalDecomposition out;
  out.group = FinAbGroup(inv);
  out.to_canonical = IntMatrix(keep.size(), n);
  out.from_canonical = IntMatrix(n, keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a) {
    for (std::size_t j = 0; j < n; ++j) {
      out.to_canonical(a, j) = mod(Vt(keep[a], j), inv[a]);
      out.from_canonical(j, a) = exponent > 0 ? mod(Vinv_t(j, keep[a]), exponent) : Vinv_t(j, keep[a]);
    }
  }
  for (Int d : inv)
    for (auto [p, e] : detail::factorize(d)) out.primary[p].push_back(e);
  for (auto& [p, es] : out.primary) std::sort(es.begin(), es.end());
  return out;
}

inline CanonicalDecomposition canonical_decomposition(const std::vector<Int>& factors) {
  for (Int n : factors)
    if (n <= 0) throw PreconditionError("zero or negative modulus");
  IntMatrix R(factors.size(), factors.size());
  Int N = 1;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    R(i, i) = factors[i];
    N = lcm(N, factors[i]);
  }
  return canonical_decomposition(R, N);
}

// True iff the integer matrix defines a homomorphism sub -> amb (columns are
// images of the sub generators).
inline bool is_homomorphism(const IntMatrix& map, const FinAbGroup& sub, const FinAbGroup& amb) {
  if (map.rows() != amb.rank() || map.cols() != sub.rank()) return false;
  for (std::size_t j = 0; j < sub.rank(); ++j)
    for (std::size_t i = 0; i < amb.rank(); ++i)
      if (mod(checked_mul(sub.factor(j), map(i, j)), amb.factor(i)) != 0) return false;
  return true;
}

namespace detail {

// Lattice of integer vectors c with map * c == 0 in amb.
inline IntMatrix kernel_lattice(const IntMatrix& map, const FinAbGroup& amb) {
  const std::size_t n = amb.rank(), g = map.cols();
  IntMatrix A(n, g + n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < g; ++j) A(i, j) = map(i, j);
    A(i, g + i) = amb.factor(i);
  }
  IntMatrix K = integer_kernel(A);
  // The lattice contains N Z^g for the exponent N of amb; reducing mod N
  // keeps the generators small.
  const Int N = exponent(amb);
  IntMatrix rows(K.cols() + g, g);
  for (std::size_t c = 0; c < K.cols(); ++c)
    for (std::size_t j = 0; j < g; ++j) rows(c, j) = mod(K(j, c), N);
  for (std::size_t j = 0; j < g; ++j) rows(K.cols() + j, j) = N;
  return rows;
}

// |Z^g / L| for a full-rank lattice L given by generator rows; 0 if not full rank.
inline Int lattice_index(const IntMatrix& gens, std::size_t g, Int exponent = 0) {
  if (g == 0) return 1;
  if (gens.rows() == 0) return 0;
  SmithForm s = smith_normal_form(gens, false, exponent);
  if (s.rank < g) return 0;
  Int idx = 1;
  for (std::size_t i = 0; i < g; ++i) idx = checked_mul(idx, s.diag(i));
  return idx;
}

}  // namespace detail

/// Injective homomorphism sub -> amb given by an integer matrix.
struct SubgroupEmbedding {
  FinAbGroup sub;
  FinAbGroup amb;
  IntMatrix map;  // amb.rank() x sub.rank()

  std::vector<Int> apply(const std::vector<Int>& y) const { return amb.reduce(map.apply(y)); }

  Int index() const { return amb.order() / sub.order(); }

  bool is_injective() const {
    IntMatrix K = detail::kernel_lattice(map, amb);
    return detail::lattice_index(K, sub.rank(), detail::exponent(amb)) == sub.order();
  }

  void validate() const {
    require(is_homomorphism(map, sub, amb), "embedding matrix does not respect the moduli");
    require(is_injective(), "embedding is not injective");
  }
};

/// Subgroup of `amb` generated by `gens`, in canonical form.
inline SubgroupEmbedding subgroup_from_generators(const FinAbGroup& amb, const std::vector<GroupElement>& gens) {
  const std::size_t n = amb.rank(), g = gens.size();
  IntMatrix G(n, g);
  for (std::size_t j = 0; j < g; ++j) {
    require(gens[j].coords.size() == n, "generator rank mismatch");
    auto x = amb.reduce(gens[j].coords);
    for (std::size_t i = 0; i < n; ++i) G(i, j) = x[i];
  }
  if (g == 0) return {FinAbGroup{}, amb, IntMatrix(n, 0)};
  CanonicalDecomposition cd = canonical_decomposition(detail::kernel_lattice(G, amb), detail::exponent(amb));
  IntMatrix M = G * cd.from_canonical;
  for (std::size_t i = 0; i < M.rows(); ++i)
    for (std::size_t j = 0; j < M.cols(); ++j) M(i, j) = mod(M(i, j), amb.factor(i));
  return {cd.group, amb, M};
}

/// Quotient amb / image(emb) in canonical form, with maps to and from amb coordinates.
inline CanonicalDecomposition quotient(const SubgroupEmbedding& emb) {
  const std::size_t n = emb.amb.rank();
  IntMatrix R(emb.map.cols() + n, n);
  for (std::size_t j = 0; j < emb.map.cols(); ++j)
    for (std::size_t i = 0; i < n; ++i) R(j, i) = emb.map(i, j);
  for (std::size_t i = 0; i < n; ++i) R(emb.map.cols() + i, i) = emb.amb.factor(i);
  return canonical_decomposition(R, detail::exponent(emb.amb));
}

// ---------------------------------------------------------------------------
// Characters

/// Character x -> sum_i xi_i x_i / n_i (mod 1) of a finite abelian group.
struct Character {
  FinAbGroup parent;
  std::vector<Int> frequency;

  friend bool operator==(const Character&, const Character&) = default;
};

inline TorusPoint eval_character(const Character& chi, const std::vector<Int>& x) {
  require(x.size() == chi.parent.rank() && chi.frequency.size() == chi.parent.rank(),
          "character/element group mismatch");
  Rational s(0);
  for (std::size_t i = 0; i < x.size(); ++i)
    s = (s + Rational(mod(checked_mul(chi.frequency[i], x[i]), chi.parent.factor(i)), chi.parent.factor(i))).frac();
  return TorusPoint(s);
}

inline TorusPoint eval_character(const Character& chi, const GroupElement& x) {
  return eval_character(chi, x.coords);
}

/// All characters of emb.amb that are trivial on the image of emb.
///
/// Solves sum_i xi_i M_ij / n_i == 0 (mod 1) for every generator column j by
/// Smith reduction; the solution lattice is then enumerated. The result is
/// sorted by row-major position of the frequency vector.
inline std::vector<Character> annihilator(const SubgroupEmbedding& emb) {
  const FinAbGroup& amb = emb.amb;
  const std::size_t n = amb.rank(), s = emb.sub.rank();
  Int L = 1;
  for (Int f : amb.factors()) L = lcm(L, f);
  // Unknowns (xi, u): sum_i (M_ij L / n_i) xi_i + L u_j = 0.
  IntMatrix A(s, n + s);
  for (std::size_t j = 0; j < s; ++j) {
    for (std::size_t i = 0; i < n; ++i) A(j, i) = checked_mul(emb.map(i, j), L / amb.factor(i));
    A(j, n + j) = L;
  }
  std::vector<GroupElement> gens;
  if (s == 0) {
    for (std::size_t i = 0; i < n; ++i) {
      GroupElement e{std::vector<Int>(n, 0)};
      e.coords[i] = 1;
      gens.push_back(e);
    }
  } else {
    IntMatrix K = integer_kernel(A);
    for (std::size_t c = 0; c < K.cols(); ++c) {
      GroupElement e{std::vector<Int>(n)};
      for (std::size_t i = 0; i < n; ++i) e.coords[i] = K(i, c);
      gens.push_back(e);
    }
  }
  SubgroupEmbedding ann = subgroup_from_generators(amb, gens);
  std::vector<std::vector<Int>> freqs;
  ann.sub.for_each_element([&](const std::vector<Int>& c) { freqs.push_back(ann.apply(c)); });
  std::sort(freqs.begin(), freqs.end(),
            [&](const auto& a, const auto& b) { return amb.index_of(a) < amb.index_of(b); });
  std::vector<Character> out;
  out.reserve(freqs.size());
  for (auto& f : freqs) out.push_back({amb, std::move(f)});
  return out;
}

// ---------------------------------------------------------------------------
// Extension ladder

enum class StepKind { Split, NonSplit };

inline const char* to_string(StepKind k) { return k == StepKind::Split ? "split" : "nonsplit"; }

/// One rung Z_{i-1} <= Z_i of a ladder.
///
/// `source` is Z_{i-1} re-coordinatized so that the rung is standard:
///   Split{p}:       Z_i = Z_p + source,          y -> (0, y)
///   NonSplit{p,d}:  source = Z_d + K, Z_i = Z_{pd} + K, (y_1, k) -> (p y_1, k)
/// `to_source`/`from_source` convert between the previous rung's coordinates
/// and `source`. `embedding` is the composite previous -> Z_i.
struct LadderStep {
  StepKind kind = StepKind::Split;
  Int p = 0;
  Int d = 0;  // NonSplit only
  FinAbGroup source;
  IntMatrix to_source;
  IntMatrix from_source;
  FinAbGroup group;
  SubgroupEmbedding embedding;
};

struct Ladder {
  FinAbGroup base;  // Z_0 in the coordinates of the input embedding's sub
  FinAbGroup top;   // the ambient group
  std::vector<LadderStep> steps;
  IntMatrix final_iso;      // last rung coordinates -> top coordinates
  IntMatrix final_iso_inv;  // top coordinates -> last rung coordinates

  std::size_t length() const { return steps.size(); }
  const FinAbGroup& last_group() const { return steps.empty() ? base : steps.back().group; }
};

namespace detail {

// A direct-sum basis of a subgroup of amb: vecs[j] has order orders[j].
struct SubBasis {
  std::vector<std::vector<Int>> vecs;
  std::vector<Int> orders;
};

inline IntMatrix stacked(const FinAbGroup& amb, const std::vector<std::vector<Int>>& vecs) {
  const std::size_t n = amb.rank();
  IntMatrix A(n, vecs.size() + n);
  for (std::size_t j = 0; j < vecs.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) A(i, j) = vecs[j][i];
  for (std::size_t i = 0; i < n; ++i) A(i, vecs.size() + i) = amb.factor(i);
  return A;
}

inline std::optional<std::vector<Int>> coords_in(const FinAbGroup& amb, const SubBasis& b,
                                                 const std::vector<Int>& x) {
  auto y = solve_integer(stacked(amb, b.vecs), x);
  if (!y) return std::nullopt;
  std::vector<Int> c(b.vecs.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = mod((*y)[j], b.orders[j]);
  return c;
}

// Matrix whose column j holds the coordinates of from.vecs[j] in `to`.
inline IntMatrix change_of_basis(const FinAbGroup& amb, const SubBasis& from, const SubBasis& to) {
  IntMatrix M(to.vecs.size(), from.vecs.size());
  for (std::size_t j = 0; j < from.vecs.size(); ++j) {
    auto c = coords_in(amb, to, from.vecs[j]);
    check_identity(c.has_value(), "ladder: basis vector outside the next subgroup");
    for (std::size_t i = 0; i < c->size(); ++i) M(i, j) = (*c)[i];
  }
  return M;
}

inline std::vector<Int> scaled(const FinAbGroup& amb, const std::vector<Int>& v, Int f) {
  std::vector<Int> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = mod(checked_mul(v[i], f), amb.factor(i));
  return r;
}

// Primary (prime-power order) basis of the subgroup generated by gens.
inline SubBasis primary_basis(const FinAbGroup& amb, const std::vector<GroupElement>& gens) {
  SubgroupEmbedding e = subgroup_from_generators(amb, gens);
  SubBasis out;
  for (std::size_t j = 0; j < e.sub.rank(); ++j) {
    Int dj = e.sub.factor(j);
    auto col = e.map.col(j);
    for (auto [p, k] : factorize(dj)) {
      Int pe = ipow(p, k);
      out.vecs.push_back(scaled(amb, col, dj / pe));
      out.orders.push_back(pe);
    }
  }
  return out;
}

}  // namespace detail

/// Ladder Z_0 = sub <= Z_1 <= ... <= Z_t = amb of prime-index rungs.
///
/// Each rung adds an element of order p modulo the current subgroup, p the
/// smallest prime dividing the remaining index, taken from the smallest
/// p-primary cyclic factor of the current quotient. The rung is then
/// classified by the character of order p that cuts out the smaller group.
inline Ladder build_ladder(const SubgroupEmbedding& emb) {
  emb.validate();
  const FinAbGroup& amb = emb.amb;
  Ladder L;
  L.base = emb.sub;
  L.top = amb;

  detail::SubBasis cur;
  for (std::size_t j = 0; j < emb.sub.rank(); ++j) {
    cur.vecs.push_back(amb.reduce(emb.map.col(j)));
    cur.orders.push_back(emb.sub.factor(j));
  }
  FinAbGroup cur_group = emb.sub;

  auto as_embedding = [&](const detail::SubBasis& b) {
    IntMatrix M(amb.rank(), b.vecs.size());
    for (std::size_t j = 0; j < b.vecs.size(); ++j)
      for (std::size_t i = 0; i < amb.rank(); ++i) M(i, j) = b.vecs[j][i];
    return SubgroupEmbedding{FinAbGroup(b.orders), amb, M};
  };

  for (;;) {
    CanonicalDecomposition Q = quotient(as_embedding(cur));
    if (Q.group.order() == 1) break;
    Int p = Q.primary.begin()->first;
    // Smallest p-primary cyclic factor of the quotient.
    std::size_t pick = Q.group.rank();
    int best_e = 0;
    for (std::size_t j = 0; j < Q.group.rank(); ++j) {
      Int q = Q.group.factor(j);
      int e = 0;
      while (q % p == 0) {
        q /= p;
        ++e;
      }
      if (e > 0 && (pick == Q.group.rank() || e < best_e)) {
        pick = j;
        best_e = e;
      }
    }
    std::vector<Int> y(Q.group.rank(), 0);
    y[pick] = Q.group.factor(pick) / p;
    std::vector<Int> x = amb.reduce(Q.from_canonical.apply(y));

    std::vector<GroupElement> gens;
    for (const auto& v : cur.vecs) gens.push_back({v});
    gens.push_back({x});
    detail::SubBasis next = detail::primary_basis(amb, gens);

    // chi(g) = c with g - c x in the current subgroup.
    auto chi = [&](const std::vector<Int>& g) -> Int {
      for (Int c = 0; c < p; ++c) {
        auto r = amb.sub(g, detail::scaled(amb, x, c));
        if (detail::coords_in(amb, cur, r)) return c;
      }
      throw IdentityViolation("ladder: rung index is not p");
    };
    std::vector<Int> chis(next.vecs.size());
    std::size_t star = next.vecs.size();
    for (std::size_t j = 0; j < next.vecs.size(); ++j) {
      chis[j] = next.orders[j] % p == 0 ? chi(next.vecs[j]) : 0;
      if (chis[j] != 0 && (star == next.vecs.size() || next.orders[j] < next.orders[star])) star = j;
    }
    check_identity(star < next.vecs.size(), "ladder: no generator detects the new element");
    Int inv_star = 0, dummy = 0;
    ext_gcd(chis[star], p, inv_star, dummy);
    inv_star = mod(inv_star, p);

    detail::SubBasis rung;  // Z_i basis: distinguished generator first
    detail::SubBasis rest;  // complement K inside both groups
    rung.vecs.push_back(next.vecs[star]);
    rung.orders.push_back(next.orders[star]);
    for (std::size_t j = 0; j < next.vecs.size(); ++j) {
      if (j == star) continue;
      auto v = next.vecs[j];
      if (chis[j] != 0) v = amb.sub(v, detail::scaled(amb, next.vecs[star], mod(chis[j] * inv_star, p)));
      rest.vecs.push_back(v);
      rest.orders.push_back(next.orders[j]);
    }
    rung.vecs.insert(rung.vecs.end(), rest.vecs.begin(), rest.vecs.end());
    rung.orders.insert(rung.orders.end(), rest.orders.begin(), rest.orders.end());

    LadderStep step;
    step.p = p;
    detail::SubBasis source;
    Int e_star = next.orders[star];
    if (e_star == p) {
      step.kind = StepKind::Split;
      source = rest;
    } else {
      step.kind = StepKind::NonSplit;
      step.d = e_star / p;
      source.vecs.push_back(detail::scaled(amb, next.vecs[star], p));
      source.orders.push_back(step.d);
      source.vecs.insert(source.vecs.end(), rest.vecs.begin(), rest.vecs.end());
      source.orders.insert(source.orders.end(), rest.orders.begin(), rest.orders.end());
    }
    step.source = FinAbGroup(source.orders);
    step.group = FinAbGroup(rung.orders);
    step.to_source = detail::change_of_basis(amb, cur, source);
    step.from_source = detail::change_of_basis(amb, source, cur);

    IntMatrix standard(rung.vecs.size(), source.vecs.size());
    if (step.kind == StepKind::Split) {
      for (std::size_t j = 0; j < source.vecs.size(); ++j) standard(j + 1, j) = 1;
    } else {
      standard(0, 0) = p;
      for (std::size_t j = 1; j < source.vecs.size(); ++j) standard(j, j) = 1;
    }
    IntMatrix M = standard * step.to_source;
    for (std::size_t i = 0; i < M.rows(); ++i)
      for (std::size_t j = 0; j < M.cols(); ++j) M(i, j) = mod(M(i, j), step.group.factor(i));
    step.embedding = SubgroupEmbedding{cur_group, step.group, M};

    L.steps.push_back(std::move(step));
    cur = std::move(rung);
    cur_group = L.steps.back().group;
  }

  detail::SubBasis unit;
  for (std::size_t i = 0; i < amb.rank(); ++i) {
    std::vector<Int> e(amb.rank(), 0);
    e[i] = mod(1, amb.factor(i));
    unit.vecs.push_back(e);
    unit.orders.push_back(amb.factor(i));
  }
  L.final_iso = IntMatrix(amb.rank(), cur.vecs.size());
  for (std::size_t j = 0; j < cur.vecs.size(); ++j)
    for (std::size_t i = 0; i < amb.rank(); ++i) L.final_iso(i, j) = cur.vecs[j][i];
  L.final_iso_inv = detail::change_of_basis(amb, unit, cur);
  return L;
}

namespace detail {

inline bool same_hom(const IntMatrix& a, const IntMatrix& b, const FinAbGroup& target) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (mod(checked_sub(a(i, j), b(i, j)), target.factor(i)) != 0) return false;
  return true;
}

inline bool is_identity_on(const IntMatrix& m, const FinAbGroup& g) {
  return same_hom(m, IntMatrix::identity(g.rank()), g);
}

}  // namespace detail

/// Checks every structural claim about a ladder for `emb`; throws
/// IdentityViolation naming the first failure.
inline void verify_ladder(const Ladder& L, const SubgroupEmbedding& emb) {
  check_identity(L.base == emb.sub && L.top == emb.amb, "ladder endpoints differ from the embedding");
  FinAbGroup prev = L.base;
  IntMatrix composed = IntMatrix::identity(prev.rank());
  for (std::size_t i = 0; i < L.steps.size(); ++i) {
    const LadderStep& s = L.steps[i];
    const std::string at = "ladder step " + std::to_string(i) + ": ";
    check_identity(is_prime(s.p), at + "p is not prime");
    check_identity(s.embedding.sub == prev, at + "embedding source is not the previous rung");
    check_identity(s.group.order() == checked_mul(prev.order(), s.p), at + "index is not p");
    check_identity(is_homomorphism(s.to_source, prev, s.source) && is_homomorphism(s.from_source, s.source, prev),
                   at + "source change of coordinates is not a homomorphism");
    check_identity(detail::is_identity_on(s.from_source * s.to_source, prev) &&
                       detail::is_identity_on(s.to_source * s.from_source, s.source),
                   at + "source change of coordinates is not an isomorphism");
    const auto& gf = s.group.factors();
    const auto& sf = s.source.factors();
    if (s.kind == StepKind::Split) {
      check_identity(gf.size() == sf.size() + 1 && gf[0] == s.p && std::equal(sf.begin(), sf.end(), gf.begin() + 1),
                     at + "split rung is not Z_p + previous");
    } else {
      check_identity(!sf.empty() && sf[0] == s.d && gf.size() == sf.size() && gf[0] == checked_mul(s.p, s.d) &&
                         std::equal(sf.begin() + 1, sf.end(), gf.begin() + 1),
                     at + "non-split rung is not pZ_{pd} + K <= Z_{pd} + K");
    }
    s.embedding.validate();
    composed = s.embedding.map * composed;
    prev = s.group;
  }
  IntMatrix total = L.final_iso * composed;
  check_identity(detail::same_hom(total, emb.map, emb.amb), "composed ladder does not reproduce the embedding");
  check_identity(detail::is_identity_on(L.final_iso * L.final_iso_inv, emb.amb) &&
                     detail::is_identity_on(L.final_iso_inv * L.final_iso, L.last_group()),
                 "final isomorphism is not invertible");
  Int idx = emb.index(), bound = 0;
  while ((Int(1) << (bound + 1)) <= idx) ++bound;
  check_identity(static_cast<Int>(L.length()) <= bound, "ladder longer than log2(index)");
}

}  // namespace nilext
