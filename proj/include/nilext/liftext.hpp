#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "nilext/abgroup.hpp"
#include "nilext/gowers.hpp"
#include "nilext/polymap.hpp"

namespace nilext {

// ---------------------------------------------------------------------------
// The group H' = Poly_{<=k}(Q^r -> Q^d) x| Q^r
//
//   (f, x) (g, y) = (f + g(. + x), x + y)
//   (f, x)^{-1}   = (-f(. - x), -x)
//   Lambda'       = {(h, m) : h integer Taylor coefficients, m in Z^r}

struct HPoint {
  PolyMap poly;  // real-valued
  std::vector<Rational> shift;

  int arity() const { return static_cast<int>(shift.size()); }
  friend bool operator==(const HPoint&, const HPoint&) = default;
};

inline HPoint h_identity(int r, int k, int d) {
  return {PolyMap(r, k, d, Target::real()), std::vector<Rational>(static_cast<std::size_t>(r), Rational(0))};
}

namespace detail {

inline void require_same_shape(const HPoint& a, const HPoint& b) {
  require(a.poly.arity() == b.poly.arity() && a.poly.degree_bound() == b.poly.degree_bound() &&
              a.poly.dim() == b.poly.dim() && a.shift.size() == b.shift.size(),
          "HPoint shape mismatch");
  require(a.poly.target().kind == TargetKind::Real && b.poly.target().kind == TargetKind::Real,
          "HPoint polynomials are real-valued");
}

inline std::vector<Rational> scale(const std::vector<Rational>& x, const Rational& t) {
  std::vector<Rational> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] * t;
  return r;
}

inline bool all_integer(const std::vector<Rational>& x) {
  for (const auto& q : x)
    if (!q.is_integer()) return false;
  return true;
}

}  // namespace detail

inline HPoint h_mul(const HPoint& a, const HPoint& b) {
  detail::require_same_shape(a, b);
  HPoint c{a.poly + b.poly.taylor_shift(a.shift), a.shift};
  for (std::size_t i = 0; i < c.shift.size(); ++i) c.shift[i] += b.shift[i];
  return c;
}

inline HPoint h_inv(const HPoint& a) {
  auto neg = detail::scale(a.shift, Rational(-1));
  return {-a.poly.taylor_shift(neg), neg};
}

/// t -> a^t, the one-parameter subgroup through a.
///
/// With a = (f, x), the integer powers are a^n = (sum_{j<n} f(. + j x), n x).
/// The coefficients of f(. + j x) are polynomials of degree <= k in j; with
/// D_m their m-th forward differences at j = 0, sum_{j<n} binom(j, m) =
/// binom(n, m + 1) gives a^t = (sum_m binom(t, m + 1) D_m, t x) for all t.
class OneParameter {
public:
  OneParameter() = default;
  explicit OneParameter(const HPoint& a) : shift_(a.shift) {
    const int k = a.poly.degree_bound();
    std::vector<PolyMap> S;
    for (int j = 0; j <= k; ++j) S.push_back(a.poly.taylor_shift(detail::scale(a.shift, Rational(j))));
    for (int m = 0; m <= k; ++m) {
      PolyMap D = PolyMap(a.poly.arity(), k, a.poly.dim(), Target::real());
      for (int i = 0; i <= m; ++i) {
        Rational c(binom_int(m, i));
        if ((m - i) % 2) c = -c;
        D = D + c * S[static_cast<std::size_t>(i)];
      }
      diffs_.push_back(std::move(D));
    }
  }

  HPoint at(const Rational& t) const {
    HPoint out{PolyMap(diffs_[0].arity(), diffs_[0].degree_bound(), diffs_[0].dim(), Target::real()),
               detail::scale(shift_, t)};
    if (t.is_zero()) return out;
    for (std::size_t m = 0; m < diffs_.size(); ++m) {
      Rational b = binom(t, static_cast<int>(m) + 1);
      if (!b.is_zero()) out.poly = out.poly + b * diffs_[m];
    }
    return out;
  }

private:
  std::vector<Rational> shift_;
  std::vector<PolyMap> diffs_;
};

inline HPoint h_pow(const HPoint& a, const Rational& t) { return OneParameter(a).at(t); }

inline HPoint h_commutator(const HPoint& a, const HPoint& b) {
  return h_mul(h_mul(h_inv(a), h_inv(b)), h_mul(a, b));
}

inline bool in_lattice(const HPoint& a) { return detail::all_integer(a.shift) && a.poly.all_integer(); }

/// a Lambda' = b Lambda', i.e. b^{-1} a = ((f - g)(. - y), x - y) in Lambda'.
inline bool lambda_coset_eq(const HPoint& a, const HPoint& b) {
  detail::require_same_shape(a, b);
  return in_lattice(h_mul(h_inv(b), a));
}

// ---------------------------------------------------------------------------
// Linear orbits z -> base * prod_i h_i^{z_i} Lambda'

class LinearOrbit {
public:
  LinearOrbit() = default;
  LinearOrbit(HPoint base, std::vector<HPoint> gens, std::vector<Int> moduli)
      : base_(std::move(base)), gens_(std::move(gens)), moduli_(std::move(moduli)) {
    require(gens_.size() == moduli_.size(), "one modulus per generator");
    for (const auto& h : gens_) {
      detail::require_same_shape(base_, h);
      flows_.emplace_back(h);
    }
  }

  const HPoint& base() const { return base_; }
  const std::vector<HPoint>& generators() const { return gens_; }
  const std::vector<Int>& moduli() const { return moduli_; }
  int degree() const { return base_.poly.degree_bound(); }
  int fiber_dim() const { return base_.poly.dim(); }
  int arity() const { return base_.arity(); }

  HPoint power(std::size_t i, const Rational& t) const { return flows_[i].at(t); }

  /// base * prod_i h_i^{z_i}.
  HPoint point(const std::vector<Int>& z) const {
    require(z.size() == gens_.size(), "orbit point has the wrong rank");
    HPoint P = base_;
    for (std::size_t i = 0; i < z.size(); ++i)
      if (z[i] != 0) P = h_mul(P, flows_[i].at(Rational(z[i])));
    return P;
  }

  /// Shift and f(0) of base * prod_i h_i^{z_i} = (f, s), without forming the
  /// product: (f, x)(g, y) evaluates at 0 to f(0) + g(x).
  std::pair<std::vector<Rational>, std::vector<Rational>> shift_and_value(const std::vector<Int>& z) const {
    require(z.size() == gens_.size(), "orbit point has the wrong rank");
    std::vector<Rational> s = base_.shift;
    std::vector<Rational> val(static_cast<std::size_t>(fiber_dim()));
    for (int c = 0; c < fiber_dim(); ++c) val[static_cast<std::size_t>(c)] = base_.poly.coeff(0, c);
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (z[i] == 0) continue;
      HPoint Q = flows_[i].at(Rational(z[i]));
      auto q = Q.poly.eval_raw(s);
      for (std::size_t c = 0; c < val.size(); ++c) val[c] += q[c];
      for (std::size_t j = 0; j < s.size(); ++j) s[j] += Q.shift[j];
    }
    return {std::move(s), std::move(val)};
  }

  bool generators_commute() const {
    for (std::size_t i = 0; i < gens_.size(); ++i)
      for (std::size_t j = i + 1; j < gens_.size(); ++j)
        if (h_mul(gens_[i], gens_[j]) != h_mul(gens_[j], gens_[i])) return false;
    return true;
  }

  bool periods_in_lattice() const {
    for (std::size_t i = 0; i < gens_.size(); ++i)
      if (!in_lattice(power(i, Rational(moduli_[i])))) return false;
    return true;
  }

  void validate() const {
    check_identity(generators_commute(), "linear orbit generators do not commute");
    check_identity(periods_in_lattice(), "linear orbit: h_i^{n_i} is not in the lattice");
  }

  Int max_denominator() const {
    Int m = base_.poly.max_denominator();
    for (const auto& q : base_.shift) m = std::max(m, q.den());
    for (const auto& h : gens_) {
      m = std::max(m, h.poly.max_denominator());
      for (const auto& q : h.shift) m = std::max(m, q.den());
    }
    return m;
  }

private:
  HPoint base_;
  std::vector<HPoint> gens_;
  std::vector<Int> moduli_;
  std::vector<OneParameter> flows_;
};

/// ev_0 on the coset of base * prod h_i^{z_i}: when the shift s is integral,
/// P (0, -s) = (f, 0) and the value is f(0) mod 1 per component. Returns
/// nullopt (OUTSIDE) when s is not integral.
inline std::optional<std::vector<Rational>> orbit_eval(const LinearOrbit& L, const std::vector<Int>& z) {
  auto [s, val] = L.shift_and_value(z);
  if (!detail::all_integer(s)) return std::nullopt;
  for (auto& q : val) q = q.frac();
  return val;
}

/// Linear orbit for a torus-valued phi on prod Z_{n_i}: base (phi, 0) and
/// h_i = (phi, 0)^{-1} (0, e_i) (phi, 0) = (phi(. + e_i) - phi, e_i).
inline LinearOrbit linearize(const PolyMap& phi, const std::vector<Int>& moduli) {
  require(phi.target().kind == TargetKind::Torus, "linearize needs a torus-valued map");
  require(moduli.size() == static_cast<std::size_t>(phi.arity()), "one modulus per variable");
  require(descends_to_quotient(phi, moduli), "map is not periodic in the given moduli");
  const int r = phi.arity();
  HPoint c{phi.with_target(Target::real()), std::vector<Rational>(static_cast<std::size_t>(r), Rational(0))};
  std::vector<HPoint> gens;
  for (int i = 0; i < r; ++i) {
    HPoint e = h_identity(r, phi.degree_bound(), phi.dim());
    e.shift[static_cast<std::size_t>(i)] = Rational(1);
    gens.push_back(h_mul(h_mul(h_inv(c), e), c));
  }
  LinearOrbit L(c, std::move(gens), moduli);
  L.validate();
  return L;
}

// ---------------------------------------------------------------------------
// Nilsequences

/// Concrete complexity ledger: filtration degree, shift dimension, fiber
/// dimension, largest denominator in the orbit data, non-split steps taken.
struct Complexity {
  int k = 0;
  int r = 0;
  int d = 0;
  Int max_den = 1;
  int nonsplit_steps = 0;

  friend bool operator==(const Complexity&, const Complexity&) = default;
};

/// x -> F(orbit(x - shift)) e(twist . x) on a finite abelian group, with
/// F(theta) = e(freq . theta) on T^d and F = 0 at OUTSIDE points.
struct Nilsequence {
  FinAbGroup domain;
  std::variant<PolyMap, LinearOrbit> orbit;
  std::vector<Int> freq;
  std::vector<Int> shift;
  std::vector<Int> twist;
  int nonsplit_steps = 0;

  bool is_linear() const { return std::holds_alternative<LinearOrbit>(orbit); }
  const PolyMap& poly() const { return std::get<PolyMap>(orbit); }
  const LinearOrbit& linear() const { return std::get<LinearOrbit>(orbit); }
  int fiber_dim() const { return is_linear() ? linear().fiber_dim() : poly().dim(); }

  /// Orbit point in T^d at x - shift, or nullopt at OUTSIDE.
  std::optional<std::vector<Rational>> point(const std::vector<Int>& x) const {
    require(x.size() == domain.rank(), "point outside the domain");
    auto y = domain.reduce(domain.sub(x, shift));
    if (is_linear()) return orbit_eval(linear(), y);
    return poly().eval(y);
  }

  Complex value(const std::vector<Int>& x) const {
    auto th = point(x);
    if (!th) return 0;
    Rational s(0);
    for (std::size_t c = 0; c < th->size(); ++c) s = (s + (*th)[c] * Rational(freq[c])).frac();
    for (std::size_t i = 0; i < twist.size(); ++i)
      s = (s + Rational(mod(checked_mul(twist[i], x[i]), domain.factor(i)), domain.factor(i))).frac();
    return e_of(s);
  }

  GroupFunction sample() const {
    GroupFunction f(domain);
    for (Int i = 0; i < domain.order(); ++i) f[static_cast<std::size_t>(i)] = value(domain.element_at(i));
    return f;
  }

  Complexity complexity() const {
    if (is_linear()) {
      const auto& L = linear();
      return {L.degree() + 1, L.arity(), L.fiber_dim(), L.max_denominator(), nonsplit_steps};
    }
    return {poly().degree_bound(), poly().arity(), poly().dim(), poly().max_denominator(), nonsplit_steps};
  }

  void validate() const {
    require(freq.size() == static_cast<std::size_t>(fiber_dim()), "fiber frequency has the wrong dimension");
    require(shift.size() == domain.rank() && twist.size() == domain.rank(), "shift/twist rank mismatch");
    if (is_linear()) {
      require(linear().moduli() == domain.factors(), "linear orbit moduli differ from the domain");
      linear().validate();
    } else {
      require(poly().target().kind == TargetKind::Torus, "polynomial orbit must be torus-valued");
      require(poly().arity() == static_cast<int>(domain.rank()), "polynomial orbit arity differs from the domain");
      require(descends_to_quotient(poly(), domain.factors()), "polynomial orbit does not descend to the domain");
    }
  }
};

/// e(phi(x)) with F(theta) = e(theta_1 + ... + theta_d).
inline Nilsequence make_nilsequence(const FinAbGroup& domain, const PolyMap& phi) {
  Nilsequence N{domain, phi, std::vector<Int>(static_cast<std::size_t>(phi.dim()), 1),
                std::vector<Int>(domain.rank(), 0), std::vector<Int>(domain.rank(), 0), 0};
  N.validate();
  return N;
}

inline Nilsequence linearize(const Nilsequence& N) {
  if (N.is_linear()) return N;
  Nilsequence out = N;
  out.orbit = linearize(N.poly(), N.domain.factors());
  return out;
}

namespace detail {

inline void require_untwisted(const Nilsequence& N) {
  for (Int v : N.shift) require(v == 0, "extension needs an unshifted nilsequence");
  for (Int v : N.twist) require(v == 0, "extension needs an untwisted nilsequence");
}

}  // namespace detail

/// Pullback along a homomorphism M: new_domain -> N.domain (columns are the
/// images of the new generators).
inline Nilsequence transport(const Nilsequence& N, const IntMatrix& M, const FinAbGroup& new_domain) {
  detail::require_untwisted(N);
  require(is_homomorphism(M, new_domain, N.domain), "transport matrix is not a homomorphism");
  Nilsequence out{new_domain, PolyMap(), N.freq, std::vector<Int>(new_domain.rank(), 0),
                  std::vector<Int>(new_domain.rank(), 0), N.nonsplit_steps};
  if (!N.is_linear()) {
    out.orbit = N.poly().compose_linear(M);
    return out;
  }
  const LinearOrbit& L = N.linear();
  std::vector<HPoint> gens;
  for (std::size_t j = 0; j < new_domain.rank(); ++j) {
    HPoint g = h_identity(L.arity(), L.degree(), L.fiber_dim());
    for (std::size_t i = 0; i < N.domain.rank(); ++i) {
      Int e = mod(M(i, j), N.domain.factor(i));
      if (e != 0) g = h_mul(g, L.power(i, Rational(e)));
    }
    gens.push_back(std::move(g));
  }
  out.orbit = LinearOrbit(L.base(), std::move(gens), new_domain.factors());
  return out;
}

/// Z_p + domain, (z, x) -> N(x).
inline Nilsequence extend_split(const Nilsequence& N, Int p) {
  require(is_prime(p), "split step needs a prime");
  detail::require_untwisted(N);
  std::vector<Int> f{p};
  f.insert(f.end(), N.domain.factors().begin(), N.domain.factors().end());
  FinAbGroup big(f);
  const std::size_t r = N.domain.rank();
  if (!N.is_linear()) {
    IntMatrix proj(r, r + 1);
    for (std::size_t i = 0; i < r; ++i) proj(i, i + 1) = 1;
    return transport(N, proj, big);
  }
  const LinearOrbit& L = N.linear();
  std::vector<HPoint> gens{h_identity(L.arity(), L.degree(), L.fiber_dim())};
  gens.insert(gens.end(), L.generators().begin(), L.generators().end());
  Nilsequence out = N;
  out.domain = big;
  out.orbit = LinearOrbit(L.base(), std::move(gens), f);
  out.shift.assign(r + 1, 0);
  out.twist.assign(r + 1, 0);
  return out;
}

/// From (p Z_{pd}) + K, in coordinates Z_d + K, to Z_{pd} + K: the first
/// generator h_1 is replaced by its p-th root w_1 = h_1^{1/p}.
inline Nilsequence extend_nonsplit(const Nilsequence& N, Int p, Int d) {
  require(is_prime(p), "non-split step needs a prime");
  require(N.is_linear(), "non-split step needs a linear orbit");
  require(N.domain.rank() >= 1 && N.domain.factor(0) == d, "first domain factor must be d");
  detail::require_untwisted(N);
  const LinearOrbit& L = N.linear();
  std::vector<HPoint> gens = L.generators();
  gens[0] = L.power(0, Rational(1, p));
  std::vector<Int> f = N.domain.factors();
  f[0] = checked_mul(p, d);
  Nilsequence out = N;
  out.domain = FinAbGroup(f);
  out.orbit = LinearOrbit(L.base(), std::move(gens), f);
  out.nonsplit_steps = N.nonsplit_steps + 1;
  out.linear().validate();
  return out;
}

struct LadderExtension {
  Nilsequence result;
  std::vector<Complexity> history;  // after linearization, then after each rung
};

/// Folds split and non-split steps over the ladder, transporting along the
/// recorded changes of coordinates. A polynomial orbit is linearized first
/// when any rung is non-split.
inline LadderExtension extend_along_ladder(const Nilsequence& N0, const Ladder& L) {
  require(N0.domain == L.base, "nilsequence domain differs from the ladder base");
  detail::require_untwisted(N0);
  bool nonsplit = false;
  for (const auto& s : L.steps) nonsplit = nonsplit || s.kind == StepKind::NonSplit;
  LadderExtension out{nonsplit ? linearize(N0) : N0, {}};
  out.history.push_back(out.result.complexity());
  for (const auto& s : L.steps) {
    Nilsequence N = transport(out.result, s.from_source, s.source);
    out.result = s.kind == StepKind::Split ? extend_split(N, s.p) : extend_nonsplit(N, s.p, s.d);
    check_identity(out.result.domain == s.group, "extended domain differs from the ladder rung");
    out.history.push_back(out.result.complexity());
  }
  out.result = transport(out.result, L.final_iso_inv, L.top);
  return out;
}

// ---------------------------------------------------------------------------
// Final assembly

struct CorrelationReport {
  double delta = 0;                 // U^{k+1} norm of f, when measured by the caller
  double epsilon0 = 0;              // claimed subgroup correlation
  double subgroup_correlation = 0;  // measured |E_{y in Z_0} f(t_0 + y) conj N0(y)|
  double epsilon = 0;               // achieved |E_x f(x) conj N(x)|
  double bound = 0;                 // epsilon0 |Z_0| / |Z|
  int k = 0;
  Int index = 1;
  std::vector<Int> character;  // chosen xi in the annihilator
  Complexity complexity;
};

struct Assembly {
  Nilsequence nilsequence;
  CorrelationReport report;
  std::vector<Complexity> history;
};

/// E_{y in Z_0} f(t_0 + y) conj N0(y) for N0 on emb.sub.
inline Complex subgroup_correlation(const GroupFunction& f, const SubgroupEmbedding& emb, const std::vector<Int>& t0,
                                    const Nilsequence& N0) {
  KahanSum<Complex> s;
  emb.sub.for_each_element([&](const std::vector<Int>& y) {
    s.add(f.at(emb.amb.add(t0, emb.apply(y))) * std::conj(N0.value(y)));
  });
  return s.value() / static_cast<double>(emb.sub.order());
}

/// Extends N0 from Z_0 to Z, shifts by t_0, and multiplies by the character
/// of the annihilator that maximizes the correlation with f.
inline Assembly assemble_full_nilsequence(const GroupFunction& f, const SubgroupEmbedding& emb,
                                          const std::vector<Int>& t0, const Nilsequence& N0, double eps0) {
  require(f.group == emb.amb, "f must live on the ambient group");
  require(N0.domain == emb.sub, "N0 must live on the subgroup");
  require(t0.size() == emb.amb.rank(), "t_0 has the wrong rank");
  f.require_one_bounded();
  Assembly out;
  double measured = std::abs(subgroup_correlation(f, emb, emb.amb.reduce(t0), N0));
  if (measured < eps0 - 1e-12)
    throw PreconditionError("subgroup correlation " + std::to_string(measured) + " is below epsilon_0 " +
                            std::to_string(eps0));

  LadderExtension ext = extend_along_ladder(N0, build_ladder(emb));
  Nilsequence N = ext.result;
  N.shift = emb.amb.reduce(t0);

  const FinAbGroup& Z = emb.amb;
  GroupFunction base(Z);  // f(x) conj N'(x - t_0)
  for (Int i = 0; i < Z.order(); ++i)
    base[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>(i)] * std::conj(N.value(Z.element_at(i)));

  // E_x base(x) chi(x - t_0) has the modulus of E_x base(x) chi(x).
  std::vector<Character> ann = annihilator(emb);
  double best = -1;
  std::size_t best_i = 0;
  for (std::size_t c = 0; c < ann.size(); ++c) {
    KahanSum<Complex> s;
    for (Int i = 0; i < Z.order(); ++i)
      s.add(base[static_cast<std::size_t>(i)] * e_of(eval_character(ann[c], Z.element_at(i)).value()));
    double v = std::abs(s.value()) / static_cast<double>(Z.order());
    if (v > best + 1e-12) {
      best = v;
      best_i = c;
    }
  }
  // conj N(x) must carry chi(x), so N gets the frequency -xi.
  N.twist.resize(Z.rank());
  for (std::size_t i = 0; i < Z.rank(); ++i) N.twist[i] = mod(-ann[best_i].frequency[i], Z.factor(i));

  CorrelationReport& rep = out.report;
  rep.epsilon0 = eps0;
  rep.subgroup_correlation = measured;
  rep.epsilon = std::abs(correlation(f, N.sample()));
  rep.index = emb.index();
  rep.bound = eps0 / static_cast<double>(rep.index);
  rep.k = N0.is_linear() ? N0.linear().degree() : N0.poly().degree_bound();
  rep.character = ann[best_i].frequency;
  rep.complexity = N.complexity();
  check_identity(rep.epsilon >= rep.bound - 1e-9, "assembled correlation is below epsilon_0 |Z_0| / |Z|");
  out.nilsequence = std::move(N);
  out.history = std::move(ext.history);
  return out;
}

}  // namespace nilext
