#pragma once

#include <functional>
#include <set>
#include <vector>

#include "nilext/rational.hpp"

namespace nilext {

/// Map {0,1}^n -> Z_m. Vertex v is stored at index sum_i v_i 2^i.
struct CubeMap {
  int n = 0;
  Int m = 1;
  std::vector<Int> values;

  CubeMap() = default;
  CubeMap(int n_, Int m_) : n(n_), m(m_), values(std::size_t{1} << n_, 0) {}
  CubeMap(int n_, Int m_, std::vector<Int> vals) : n(n_), m(m_), values(std::move(vals)) {
    require(values.size() == (std::size_t{1} << n), "cube table must have 2^n entries");
    for (auto& x : values) x = mod(x, m);
  }

  Int operator()(std::size_t v) const { return values[v]; }
  friend bool operator==(const CubeMap&, const CubeMap&) = default;
};

/// Cube with its top vertex 1^n missing: entries for indices 0 .. 2^n - 2.
struct Corner {
  int n = 0;
  Int m = 1;
  std::vector<Int> values;
};

inline int popcount(std::size_t v) { return __builtin_popcountll(v); }

namespace detail {

// Calls fn(base, dirs) for every face: dirs a set of `dim` directions and
// base a vertex that is zero on dirs.
inline void for_each_face(int n, int dim, const std::function<void(std::size_t, std::size_t)>& fn) {
  if (dim > n || dim < 0) return;
  const std::size_t full = (std::size_t{1} << n) - 1;
  for (std::size_t dirs = 0; dirs <= full; ++dirs) {
    if (popcount(dirs) != dim) continue;
    std::size_t rest = full & ~dirs;
    // Enumerate submasks of rest as the fixed coordinates.
    for (std::size_t base = rest;; base = (base - 1) & rest) {
      fn(base, dirs);
      if (base == 0) break;
    }
  }
}

// sum over u subset of dirs of (-1)^{|dirs| - |u|} c(base + u), mod m.
inline Int face_sum(const std::vector<Int>& c, Int m, std::size_t base, std::size_t dirs) {
  const int dim = popcount(dirs);
  Int s = 0;
  for (std::size_t u = dirs;; u = (u - 1) & dirs) {
    Int x = c[base | u];
    s = ((dim - popcount(u)) % 2) ? s - x : s + x;
    s = mod(s, m);
    if (u == 0) break;
  }
  return s;
}

}  // namespace detail

/// Membership in C^n(D_k(Z_m)): every (k+1)-face has vanishing alternating sum.
inline bool is_cube(const CubeMap& c, int k) {
  require(k >= 0, "degree must be nonnegative");
  bool ok = true;
  detail::for_each_face(c.n, k + 1, [&](std::size_t base, std::size_t dirs) {
    if (ok && detail::face_sum(c.values, c.m, base, dirs) != 0) ok = false;
  });
  return ok;
}

/// Number of free parameters of C^n(D_k(A)): one per subset of at most k directions.
inline Int cube_parameter_count(int k, int n) {
  Int t = 0;
  for (int j = 0; j <= std::min(k, n); ++j) t += binom_int(n, j);
  return t;
}

inline Int ipow_checked(Int b, Int e) {
  Int r = 1;
  for (Int i = 0; i < e; ++i) r = checked_mul(r, b);
  return r;
}

/// |C^n(D_k(Z_m))| = m^{sum_{j <= k} binom(n, j)}.
inline Int cube_count(Int m, int k, int n) { return ipow_checked(m, cube_parameter_count(k, n)); }

/// Calls fn on every cube of C^n(D_k(Z_m)). A cube is determined by its
/// Moebius coefficients a_S (S a set of directions, |S| <= k):
/// c(v) = sum_{S subset supp(v)} a_S. Throws BudgetError above `budget` cubes.
inline Int enumerate_cubes(Int m, int k, int n, Int budget, const std::function<void(const CubeMap&)>& fn) {
  require(m >= 1 && n >= 0 && k >= 0, "bad cube enumeration parameters");
  Int total = cube_count(m, k, n);
  if (total > budget) throw BudgetError("cube enumeration exceeds the budget");
  std::vector<std::size_t> sets;
  for (std::size_t S = 0; S < (std::size_t{1} << n); ++S)
    if (popcount(S) <= k) sets.push_back(S);
  std::vector<Int> a(sets.size(), 0);
  CubeMap c(n, m);
  for (Int it = 0; it < total; ++it) {
    for (std::size_t v = 0; v < c.values.size(); ++v) {
      Int s = 0;
      for (std::size_t j = 0; j < sets.size(); ++j)
        if ((sets[j] & ~v) == 0) s += a[j];
      c.values[v] = mod(s, m);
    }
    fn(c);
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (++a[j] < m) break;
      a[j] = 0;
    }
  }
  return total;
}

/// sigma_k(c) = sum_v (-1)^{k - |v|} c(v) for a k-dimensional cube.
inline Int gray_code(const CubeMap& c, int k) {
  require(c.n == k, "gray code needs a k-dimensional cube");
  return detail::face_sum(c.values, c.m, 0, (std::size_t{1} << k) - 1);
}

/// Completes a corner to a cube of C^n(D_k(Z_m)).
///
/// The top value is the one making the full alternating sum vanish (the
/// Moebius coefficient a_{[n]} = 0). For n >= k+1 every cube has that
/// property, so this is the only completion; for n <= k any value completes
/// and this is the canonical choice.
inline CubeMap complete_corner(const Corner& cr, int k) {
  const std::size_t N = std::size_t{1} << cr.n;
  require(cr.n >= 1, "corner dimension must be >= 1");
  require(cr.values.size() == N - 1, "corner must have 2^n - 1 entries");
  std::vector<Int> vals(cr.values);
  vals.push_back(0);
  for (auto& x : vals) x = mod(x, cr.m);
  // Lower faces v_i = 0 must already be cubes.
  for (int i = 0; i < cr.n; ++i) {
    // The face as an (n-1)-cube: drop bit i.
    std::vector<Int> g(N / 2);
    for (std::size_t u = 0; u < N / 2; ++u) {
      std::size_t low = u & ((std::size_t{1} << i) - 1);
      std::size_t high = (u >> i) << (i + 1);
      g[u] = vals[low | high];
    }
    if (!is_cube(CubeMap(cr.n - 1, cr.m, g), k)) throw PreconditionError("corner face is not a cube");
  }
  Int s = detail::face_sum(vals, cr.m, 0, N - 1);  // with the top value 0
  vals[N - 1] = mod(-s, cr.m);
  CubeMap c(cr.n, cr.m, vals);
  check_identity(is_cube(c, k), "corner completion is not a cube");
  return c;
}

/// All values at 1^n completing the corner; brute force over Z_m.
inline std::vector<Int> all_completions(const Corner& cr, int k) {
  std::vector<Int> out;
  std::vector<Int> vals(cr.values);
  vals.push_back(0);
  for (Int x = 0; x < cr.m; ++x) {
    vals.back() = x;
    if (is_cube(CubeMap(cr.n, cr.m, vals), k)) out.push_back(x);
  }
  return out;
}

/// Number of distinct tuples (sigma_k(c o phi_F))_F over cubes c, where F runs
/// over the binom(n, k) k-faces through 0^n.
inline Int signature_image_count(Int m, int k, int n, Int budget) {
  if (n < k) return 1;
  std::vector<std::size_t> faces;
  for (std::size_t S = 0; S < (std::size_t{1} << n); ++S)
    if (popcount(S) == k) faces.push_back(S);
  std::set<std::vector<Int>> seen;
  enumerate_cubes(m, k, n, budget, [&](const CubeMap& c) {
    std::vector<Int> sig;
    sig.reserve(faces.size());
    for (std::size_t S : faces) sig.push_back(detail::face_sum(c.values, m, 0, S));
    seen.insert(std::move(sig));
  });
  return static_cast<Int>(seen.size());
}

/// Host-Kra cube group of the filtration Z_m = ... = Z_m (k times), 0:
/// the subgroup of Z_m^{2^n} generated by g 1_F over faces F of codimension
/// <= k. Computed by closure; for cross-checking the linear test.
inline std::set<std::vector<Int>> host_kra_cubes(Int m, int k, int n, Int budget) {
  const std::size_t N = std::size_t{1} << n;
  std::vector<std::vector<Int>> gens;
  for (int dim = std::max(0, n - k); dim <= n; ++dim)
    detail::for_each_face(n, dim, [&](std::size_t base, std::size_t dirs) {
      std::vector<Int> g(N, 0);
      for (std::size_t u = dirs;; u = (u - 1) & dirs) {
        g[base | u] = 1 % m;
        if (u == 0) break;
      }
      gens.push_back(g);
    });
  std::set<std::vector<Int>> seen{std::vector<Int>(N, 0)};
  std::vector<std::vector<Int>> frontier(seen.begin(), seen.end());
  while (!frontier.empty()) {
    std::vector<std::vector<Int>> next;
    for (const auto& x : frontier)
      for (const auto& g : gens) {
        std::vector<Int> y(N);
        for (std::size_t i = 0; i < N; ++i) y[i] = mod(x[i] + g[i], m);
        if (seen.insert(y).second) {
          if (static_cast<Int>(seen.size()) > budget) throw BudgetError("cube closure exceeds the budget");
          next.push_back(std::move(y));
        }
      }
    frontier = std::move(next);
  }
  return seen;
}

}  // namespace nilext
