#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nilext/abgroup.hpp"
#include "nilext/rational.hpp"
#include "nilext/smith.hpp"

namespace nilext {

using MultiIndex = std::vector<int>;

inline int total_degree(const MultiIndex& w) {
  int s = 0;
  for (int x : w) s += x;
  return s;
}

/// The index set J = { w in Z_{>=0}^r : |w| <= k } in graded lexicographic
/// order (by total degree, then lexicographically descending within a
/// degree: for r = 2, k = 2 the order is 00, 10, 01, 20, 11, 02).
class MultiIndexSet {
public:
  MultiIndexSet(int r, int k) : r_(r), k_(k) {
    require(r >= 0 && k >= 0, "multi-index set needs r, k >= 0");
    for (int deg = 0; deg <= k; ++deg) {
      MultiIndex w(static_cast<std::size_t>(r), 0);
      emit(w, 0, deg);
    }
    for (std::size_t i = 0; i < list_.size(); ++i) pos_[list_[i]] = i;
  }

  int arity() const { return r_; }
  int degree() const { return k_; }
  std::size_t size() const { return list_.size(); }
  const MultiIndex& operator[](std::size_t i) const { return list_[i]; }
  const std::vector<MultiIndex>& all() const { return list_; }

  std::optional<std::size_t> find(const MultiIndex& w) const {
    auto it = pos_.find(w);
    if (it == pos_.end()) return std::nullopt;
    return it->second;
  }

  static std::shared_ptr<const MultiIndexSet> get(int r, int k) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const MultiIndexSet>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{r, k}];
    if (!slot) slot = std::make_shared<const MultiIndexSet>(r, k);
    return slot;
  }

private:
  void emit(MultiIndex& w, std::size_t i, int remaining) {
    if (r_ == 0) {
      if (remaining == 0) list_.push_back(w);
      return;
    }
    if (i + 1 == static_cast<std::size_t>(r_)) {
      w[i] = remaining;
      list_.push_back(w);
      w[i] = 0;
      return;
    }
    for (int x = remaining; x >= 0; --x) {
      w[i] = x;
      emit(w, i + 1, remaining - x);
    }
    w[i] = 0;
  }

  int r_, k_;
  std::vector<MultiIndex> list_;
  std::map<MultiIndex, std::size_t> pos_;
};

// binom(v, w) = prod_i binom(v_i, w_i)
inline Rational multi_binom(const std::vector<Rational>& v, const MultiIndex& w) {
  Rational r(1);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0) continue;
    r *= binom(v[i], w[i]);
    if (r.is_zero()) break;
  }
  return r;
}

enum class TargetKind { Real, Torus, Cyclic };

/// Codomain of a polynomial map: Q^d, T^d or Z_m (d = 1 for Z_m).
struct Target {
  TargetKind kind = TargetKind::Torus;
  Int modulus = 0;  // Cyclic only

  static Target real() { return {TargetKind::Real, 0}; }
  static Target torus() { return {TargetKind::Torus, 0}; }
  static Target cyclic(Int m) {
    require(m >= 1, "cyclic target needs m >= 1");
    return {TargetKind::Cyclic, m};
  }

  friend bool operator==(const Target&, const Target&) = default;

  // Canonical representative of a value.
  Rational reduce(const Rational& q) const {
    switch (kind) {
      case TargetKind::Real:
        return q;
      case TargetKind::Torus:
        return q.frac();
      case TargetKind::Cyclic:
        require(q.is_integer(), "non-integral value in a cyclic target");
        return Rational(mod(q.num(), modulus));
    }
    return q;
  }

  // q represents zero (as a coefficient of a map on Z^r).
  bool is_zero(const Rational& q) const {
    switch (kind) {
      case TargetKind::Real:
        return q.is_zero();
      case TargetKind::Torus:
        return q.is_integer();
      case TargetKind::Cyclic:
        return q.is_integer() && mod(q.num(), modulus) == 0;
    }
    return false;
  }

  std::string str() const {
    switch (kind) {
      case TargetKind::Real:
        return "real";
      case TargetKind::Torus:
        return "torus";
      case TargetKind::Cyclic:
        return "cyclic:" + std::to_string(modulus);
    }
    return "?";
  }
};

/// Polynomial map of degree <= k from Z^r (or Q^r) into a Target^d, stored by
/// its Taylor coefficients in the multi-binomial basis:
///   f(v) = sum_{|w| <= k} a_w binom(v, w).
class PolyMap {
public:
  PolyMap() : PolyMap(0, 0, 1, Target::torus()) {}
  PolyMap(int r, int k, int d, Target target)
      : r_(r), k_(k), d_(d), target_(target), idx_(MultiIndexSet::get(r, k)), coeffs_(idx_->size() * d, Rational(0)) {
    require(d >= 1, "polymap fiber dimension must be >= 1");
    require(target.kind != TargetKind::Cyclic || d == 1, "cyclic target is one-dimensional");
  }

  int arity() const { return r_; }
  int degree_bound() const { return k_; }
  int dim() const { return d_; }
  const Target& target() const { return target_; }
  const MultiIndexSet& indices() const { return *idx_; }
  std::size_t num_terms() const { return idx_->size(); }

  Rational& coeff(std::size_t term, int comp = 0) { return coeffs_[term * d_ + comp]; }
  const Rational& coeff(std::size_t term, int comp = 0) const { return coeffs_[term * d_ + comp]; }

  Rational coeff_at(const MultiIndex& w, int comp = 0) const {
    auto i = idx_->find(w);
    return i ? coeff(*i, comp) : Rational(0);
  }
  void set(const MultiIndex& w, const Rational& a, int comp = 0) {
    auto i = idx_->find(w);
    require(i.has_value(), "multi-index outside the degree bound");
    coeff(*i, comp) = a;
  }

  // Same coefficients, different codomain.
  PolyMap with_target(Target t) const {
    PolyMap g(r_, k_, d_, t);
    g.coeffs_ = coeffs_;
    return g;
  }

  // Same map with a larger degree bound.
  PolyMap with_degree(int k) const {
    require(k >= actual_degree(), "degree bound below the actual degree");
    PolyMap g(r_, k, d_, target_);
    for (std::size_t i = 0; i < num_terms(); ++i) {
      if (total_degree(indices()[i]) > k) continue;
      for (int c = 0; c < d_; ++c) g.set(indices()[i], coeff(i, c), c);
    }
    return g;
  }

  // Highest |w| carrying an exactly nonzero coefficient; -1 for the zero polynomial.
  int actual_degree() const {
    int deg = -1;
    for (std::size_t i = 0; i < num_terms(); ++i)
      for (int c = 0; c < d_; ++c)
        if (!coeff(i, c).is_zero()) deg = std::max(deg, total_degree(indices()[i]));
    return deg;
  }

  bool all_integer() const {
    for (const auto& q : coeffs_)
      if (!q.is_integer()) return false;
    return true;
  }

  Int max_denominator() const {
    Int m = 1;
    for (const auto& q : coeffs_) m = std::max(m, q.den());
    return m;
  }

  // Unreduced value sum_w a_w binom(v, w), per component.
  std::vector<Rational> eval_raw(const std::vector<Rational>& v) const {
    require(v.size() == static_cast<std::size_t>(r_), "evaluation point has the wrong arity");
    std::vector<Rational> out(d_, Rational(0));
    std::vector<std::vector<Rational>> bv(r_, std::vector<Rational>(k_ + 1));
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j <= k_; ++j) bv[i][j] = binom(v[i], j);
    for (std::size_t i = 0; i < num_terms(); ++i) {
      bool any = false;
      for (int c = 0; c < d_; ++c) any = any || !coeff(i, c).is_zero();
      if (!any) continue;
      Rational b(1);
      for (int j = 0; j < r_ && !b.is_zero(); ++j) b *= bv[j][indices()[i][j]];
      if (b.is_zero()) continue;
      for (int c = 0; c < d_; ++c) out[c] += coeff(i, c) * b;
    }
    return out;
  }

  /// Exact value in the target (torus values in [0,1), cyclic values in [0,m)).
  std::vector<Rational> eval(const std::vector<Rational>& v) const {
    if (target_.kind == TargetKind::Cyclic)
      for (const auto& q : v) require(q.is_integer(), "non-integral point for a cyclic-valued map");
    auto out = eval_raw(v);
    for (auto& q : out) q = target_.reduce(q);
    return out;
  }

  std::vector<Rational> eval(const std::vector<Int>& v) const {
    std::vector<Rational> q(v.begin(), v.end());
    return eval(q);
  }

  /// Coefficients of v -> f(v + x): (shifted)_a = sum_b a_{a+b} binom(x, b).
  PolyMap taylor_shift(const std::vector<Rational>& x) const {
    require(x.size() == static_cast<std::size_t>(r_), "shift has the wrong arity");
    bool zero = true;
    for (const auto& q : x) zero = zero && q.is_zero();
    if (zero) return *this;
    if (target_.kind == TargetKind::Cyclic)
      for (const auto& q : x) require(q.is_integer(), "non-integral shift of a cyclic-valued map");
    // binom(x_i, j) for j <= k
    std::vector<std::vector<Rational>> bx(r_, std::vector<Rational>(k_ + 1));
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j <= k_; ++j) bx[i][j] = binom(x[i], j);
    PolyMap g(r_, k_, d_, target_);
    const auto& J = indices();
    for (std::size_t ai = 0; ai < J.size(); ++ai) {
      const MultiIndex& a = J[ai];
      for (std::size_t ci = 0; ci < J.size(); ++ci) {
        const MultiIndex& c = J[ci];  // c = a + b
        Rational w(1);
        bool ok = true;
        for (int i = 0; i < r_ && ok; ++i) {
          if (c[i] < a[i]) ok = false;
          else if (c[i] > a[i]) w *= bx[i][c[i] - a[i]];
        }
        if (!ok || w.is_zero()) continue;
        for (int comp = 0; comp < d_; ++comp)
          if (!coeff(ci, comp).is_zero()) g.coeff(ai, comp) += coeff(ci, comp) * w;
      }
    }
    return g;
  }

  PolyMap taylor_shift(const std::vector<Int>& x) const {
    return taylor_shift(std::vector<Rational>(x.begin(), x.end()));
  }

  /// Additive discrete derivative: f(. + x) - f.
  PolyMap derivative(const std::vector<Rational>& x) const { return taylor_shift(x) - *this; }

  /// v -> f(M v) for an integer matrix M (r x s). Computed by Newton
  /// interpolation on the points of J_s, which is exact in degree <= k.
  PolyMap compose_linear(const IntMatrix& M) const {
    require(M.rows() == static_cast<std::size_t>(r_), "compose_linear: matrix rows must equal the arity");
    const int s = static_cast<int>(M.cols());
    std::vector<std::vector<Rational>> vals;
    auto Js = MultiIndexSet::get(s, k_);
    for (const auto& t : Js->all()) {
      std::vector<Int> tv(t.begin(), t.end());
      auto img = M.apply(tv);
      vals.push_back(eval_raw(std::vector<Rational>(img.begin(), img.end())));
    }
    return from_grid_values(s, k_, d_, target_, vals);
  }

  /// Polynomial with the given values on J_s (in its order), via
  /// c_u = sum_{t <= u} (-1)^{|u-t|} binom(u, t) f(t).
  static PolyMap from_grid_values(int s, int k, int d, Target target, const std::vector<std::vector<Rational>>& vals) {
    PolyMap g(s, k, d, target);
    const auto& J = g.indices();
    require(vals.size() == J.size(), "grid value count mismatch");
    for (std::size_t ui = 0; ui < J.size(); ++ui) {
      const MultiIndex& u = J[ui];
      for (std::size_t ti = 0; ti < J.size(); ++ti) {
        const MultiIndex& t = J[ti];
        Int w = 1;
        int sign_exp = 0;
        for (int i = 0; i < s && w != 0; ++i) {
          if (t[i] > u[i]) w = 0;
          else {
            w = checked_mul(w, binom_int(u[i], t[i]));
            sign_exp += u[i] - t[i];
          }
        }
        if (w == 0) continue;
        if (sign_exp % 2) w = -w;
        for (int c = 0; c < d; ++c) g.coeff(ui, c) += Rational(w) * vals[ti][c];
      }
    }
    return g;
  }

  friend PolyMap operator+(const PolyMap& a, const PolyMap& b) {
    a.require_compatible(b);
    PolyMap g = a;
    for (std::size_t i = 0; i < g.coeffs_.size(); ++i) g.coeffs_[i] += b.coeffs_[i];
    return g;
  }
  friend PolyMap operator-(const PolyMap& a, const PolyMap& b) {
    a.require_compatible(b);
    PolyMap g = a;
    for (std::size_t i = 0; i < g.coeffs_.size(); ++i) g.coeffs_[i] -= b.coeffs_[i];
    return g;
  }
  PolyMap operator-() const {
    PolyMap g = *this;
    for (auto& q : g.coeffs_) q = -q;
    return g;
  }
  friend PolyMap operator*(const Rational& s, const PolyMap& a) {
    PolyMap g = a;
    for (auto& q : g.coeffs_) q *= s;
    return g;
  }

  // Exact coefficient equality (shape and target included).
  friend bool operator==(const PolyMap& a, const PolyMap& b) {
    return a.r_ == b.r_ && a.k_ == b.k_ && a.d_ == b.d_ && a.target_ == b.target_ && a.coeffs_ == b.coeffs_;
  }

  /// Equality as maps Z^r -> target: coefficients agree modulo the target.
  bool same_map_as(const PolyMap& b) const {
    require_compatible(b);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      if (!target_.is_zero(coeffs_[i] - b.coeffs_[i])) return false;
    return true;
  }

  // Coefficients replaced by their canonical representatives (maps on Z^r only).
  PolyMap reduced() const {
    PolyMap g = *this;
    for (auto& q : g.coeffs_) q = target_.reduce(q);
    return g;
  }

  const std::vector<Rational>& raw_coeffs() const { return coeffs_; }

private:
  void require_compatible(const PolyMap& b) const {
    require(r_ == b.r_ && k_ == b.k_ && d_ == b.d_, "polymap shape mismatch");
  }

  int r_, k_, d_;
  Target target_;
  std::shared_ptr<const MultiIndexSet> idx_;
  std::vector<Rational> coeffs_;
};

inline std::vector<Rational> unit_vector(int r, int i, const Rational& scale = Rational(1)) {
  std::vector<Rational> e(static_cast<std::size_t>(r), Rational(0));
  e[static_cast<std::size_t>(i)] = scale;
  return e;
}

inline std::vector<Rational> eval(const PolyMap& f, const std::vector<Rational>& v) { return f.eval(v); }
inline PolyMap taylor_shift(const PolyMap& f, const std::vector<Rational>& x) { return f.taylor_shift(x); }
inline PolyMap derivative(const PolyMap& f, const std::vector<Rational>& x) { return f.derivative(x); }

/// True iff f(v + n_i e_i) = f(v) identically on Z^r for every i.
inline bool descends_to_quotient(const PolyMap& f, const std::vector<Int>& moduli) {
  require(f.target().kind != TargetKind::Real, "descends_to_quotient needs a torus or cyclic target");
  require(moduli.size() == static_cast<std::size_t>(f.arity()), "modulus count differs from the arity");
  for (int i = 0; i < f.arity(); ++i)
    if (!f.taylor_shift(unit_vector(f.arity(), i, Rational(moduli[i]))).same_map_as(f)) return false;
  return true;
}

/// A Z_m-valued map of degree <= k is (m * k!)-periodic in every coordinate.
inline bool check_period_bound(const PolyMap& f, int k) {
  require(f.target().kind == TargetKind::Cyclic, "check_period_bound needs a cyclic target");
  Int period = checked_mul(f.target().modulus, factorial(k));
  for (int i = 0; i < f.arity(); ++i)
    if (!f.taylor_shift(unit_vector(f.arity(), i, Rational(period))).same_map_as(f)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Linear systems over the torus: A a == b (mod 1), A integer, a in T^n.

struct TorusSystem {
  IntMatrix A;
  std::vector<Rational> b;
  std::vector<std::string> labels;  // one per row

  void add_row(std::vector<Int> coeffs, Rational rhs, std::string label) {
    bool nonzero = !rhs.is_integer();
    for (Int c : coeffs) nonzero = nonzero || c != 0;
    if (!nonzero) return;  // 0 == 0
    std::vector<std::vector<Int>> rows = A.to_rows();
    std::size_t cols = coeffs.size();
    if (A.rows() > 0) require(A.cols() == cols, "torus system column mismatch");
    rows.push_back(std::move(coeffs));
    A = IntMatrix::from_rows(rows, cols);
    b.push_back(rhs);
    labels.push_back(std::move(label));
  }
};

/// Witness that a torus system has no solution: an integer row vector y with
/// y A = 0 while y . b is not an integer.
struct InfeasibilityCertificate {
  TorusSystem system;
  std::vector<Int> functional;
  Rational value;  // y . b, never an integer

  bool verify() const {
    if (functional.size() != system.A.rows()) return false;
    for (std::size_t j = 0; j < system.A.cols(); ++j) {
      Int s = 0;
      for (std::size_t i = 0; i < system.A.rows(); ++i) s = checked_add(s, checked_mul(functional[i], system.A(i, j)));
      if (s != 0) return false;
    }
    Rational v(0);
    for (std::size_t i = 0; i < functional.size(); ++i) v += Rational(functional[i]) * system.b[i];
    return v == value && !v.is_integer();
  }
};

using TorusSolution = std::variant<std::vector<Rational>, InfeasibilityCertificate>;

/// Solves A a == b (mod 1) through U A V = D: with a = V u the system splits
/// into d_i u_i == (U b)_i, always solvable on T when d_i != 0, and requiring
/// (U b)_i in Z for the rows beyond the rank.
inline TorusSolution solve_torus_system(const TorusSystem& sys, std::size_t unknowns) {
  if (sys.A.rows() == 0) return std::vector<Rational>(unknowns, Rational(0));
  require(sys.A.cols() == unknowns, "torus system unknown count mismatch");
  SmithForm s = smith_normal_form(sys.A);
  const std::size_t m = sys.A.rows();
  std::vector<Rational> ub(m, Rational(0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (s.U(i, j) != 0) ub[i] += Rational(s.U(i, j)) * sys.b[j];
  for (std::size_t i = s.rank; i < m; ++i) {
    if (!ub[i].is_integer()) {
      InfeasibilityCertificate cert{sys, s.U.row(i), ub[i]};
      check_identity(cert.verify(), "torus solver produced an invalid certificate");
      return cert;
    }
  }
  std::vector<Rational> u(unknowns, Rational(0));
  for (std::size_t i = 0; i < s.rank; ++i) u[i] = (ub[i] / Rational(s.diag(i))).frac();
  std::vector<Rational> a(unknowns, Rational(0));
  for (std::size_t i = 0; i < unknowns; ++i) {
    for (std::size_t j = 0; j < unknowns; ++j)
      if (s.V(i, j) != 0 && !u[j].is_zero()) a[i] += Rational(s.V(i, j)) * u[j];
    a[i] = a[i].frac();
  }
  return a;
}

/// If every solution of a consistent system has the same value of
/// ell . a (mod 1), returns it. That happens exactly when ell lies in the
/// integer row span of A.
inline std::optional<Rational> implied_value(const TorusSystem& sys, const std::vector<Int>& ell) {
  if (sys.A.rows() == 0) {
    for (Int c : ell)
      if (c != 0) return std::nullopt;
    return Rational(0);
  }
  auto y = solve_integer(sys.A.transpose(), ell);
  if (!y) return std::nullopt;
  Rational v(0);
  for (std::size_t i = 0; i < y->size(); ++i) v += Rational((*y)[i]) * sys.b[i];
  return v.frac();
}

// ---------------------------------------------------------------------------
// Extension feasibility

struct ExtensionOptions {
  // Impose periodicity in these ambient coordinates; empty means all.
  std::vector<bool> periodic;
  bool restriction = true;
};

/// The linear system whose solutions are the Taylor coefficients (component
/// `comp`) of degree-<= k maps h on the ambient group with h o emb = g.
///
/// Rows "period[i]@w": coefficient at w of h(. + n_i e_i) - h.
/// Rows "restrict@u": coefficient at u of h(M .) - g.
inline TorusSystem extension_system(const PolyMap& g, const SubgroupEmbedding& emb, int k, int comp = 0,
                                    const ExtensionOptions& opt = {}) {
  const int n = static_cast<int>(emb.amb.rank());
  const int s = static_cast<int>(emb.sub.rank());
  require(g.arity() == s, "g arity differs from the subgroup rank");
  auto Jn = MultiIndexSet::get(n, k);
  auto Js = MultiIndexSet::get(s, k);
  const std::size_t N = Jn->size();
  TorusSystem sys;

  auto wstr = [](const MultiIndex& w) {
    std::string out;
    for (int x : w) out += std::to_string(x);
    return out;
  };

  for (int i = 0; i < n; ++i) {
    if (!opt.periodic.empty() && !opt.periodic[static_cast<std::size_t>(i)]) continue;
    Int ni = emb.amb.factor(static_cast<std::size_t>(i));
    for (std::size_t ai = 0; ai < N; ++ai) {
      const MultiIndex& a = (*Jn)[ai];
      std::vector<Int> row(N, 0);
      for (int beta = 1; a[i] + beta <= k; ++beta) {
        MultiIndex c = a;
        c[i] += beta;
        auto ci = Jn->find(c);
        if (!ci) continue;
        row[*ci] = checked_add(row[*ci], binom_int(ni, beta));
      }
      sys.add_row(std::move(row), Rational(0), "period[" + std::to_string(i) + "]@" + wstr(a));
    }
  }

  if (opt.restriction) {
    // Values binom(M t, w) on the grid t in J_s, then Newton coefficients.
    std::vector<std::vector<Int>> images;
    for (const auto& t : Js->all()) {
      std::vector<Int> tv(t.begin(), t.end());
      images.push_back(emb.map.apply(tv));
    }
    for (std::size_t ui = 0; ui < Js->size(); ++ui) {
      const MultiIndex& u = (*Js)[ui];
      std::vector<Int> row(N, 0);
      for (std::size_t ti = 0; ti < Js->size(); ++ti) {
        const MultiIndex& t = (*Js)[ti];
        Int wgt = 1;
        int sign_exp = 0;
        for (int i = 0; i < s && wgt != 0; ++i) {
          if (t[i] > u[i]) wgt = 0;
          else {
            wgt = checked_mul(wgt, binom_int(u[i], t[i]));
            sign_exp += u[i] - t[i];
          }
        }
        if (wgt == 0) continue;
        if (sign_exp % 2) wgt = -wgt;
        for (std::size_t wi = 0; wi < N; ++wi) {
          Int bv = 1;
          const MultiIndex& w = (*Jn)[wi];
          for (int i = 0; i < n && bv != 0; ++i) bv = checked_mul(bv, binom_int(images[ti][i], w[i]));
          if (bv != 0) row[wi] = checked_add(row[wi], checked_mul(wgt, bv));
        }
      }
      sys.add_row(std::move(row), g.coeff_at(u, comp), "restrict@" + wstr(u));
    }
  }
  return sys;
}

using ExtensionResult = std::variant<PolyMap, InfeasibilityCertificate>;

/// Decides whether g (a torus-valued map on emb.sub) is the restriction of a
/// degree-<= k torus-valued map on emb.amb, returning one or a certificate.
inline ExtensionResult check_extension_feasible(const PolyMap& g, const SubgroupEmbedding& emb, int k,
                                                const ExtensionOptions& opt = {}) {
  require(g.target().kind == TargetKind::Torus, "extension target must be a torus");
  require(g.arity() == static_cast<int>(emb.sub.rank()), "g arity differs from the subgroup rank");
  require(g.actual_degree() <= k, "g has degree above k");
  require(descends_to_quotient(g, emb.sub.factors()), "g is not well defined on the subgroup");
  const int n = static_cast<int>(emb.amb.rank());
  PolyMap h(n, k, g.dim(), Target::torus());
  for (int c = 0; c < g.dim(); ++c) {
    TorusSystem sys = extension_system(g, emb, k, c, opt);
    TorusSolution sol = solve_torus_system(sys, h.num_terms());
    if (auto* cert = std::get_if<InfeasibilityCertificate>(&sol)) return *cert;
    const auto& a = std::get<std::vector<Rational>>(sol);
    for (std::size_t i = 0; i < a.size(); ++i) h.coeff(i, c) = a[i];
  }
  return h;
}

}  // namespace nilext
