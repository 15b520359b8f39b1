#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <vector>

#include "nilext/abgroup.hpp"
#include "nilext/polymap.hpp"

namespace nilext {

using Complex = std::complex<double>;

/// e(t) = exp(2 pi i t).
inline Complex e_of(double t) {
  double a = 2.0 * std::numbers::pi * (t - std::floor(t));
  return {std::cos(a), std::sin(a)};
}
inline Complex e_of(const Rational& q) {
  // Reduce exactly first so large integer parts cost nothing in precision.
  return e_of(q.frac().to_double());
}

/// Compensated (Kahan) accumulator.
template <class T>
class KahanSum {
public:
  void add(T x) {
    T y = x - comp_;
    T t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  T value() const { return sum_; }

private:
  T sum_{};
  T comp_{};
};

/// Complex-valued function on a finite abelian group, stored in the group's
/// row-major element order (last coordinate fastest).
struct GroupFunction {
  FinAbGroup group;
  std::vector<Complex> values;

  GroupFunction() = default;
  explicit GroupFunction(FinAbGroup g) : group(std::move(g)), values(static_cast<std::size_t>(group.order())) {}
  GroupFunction(FinAbGroup g, std::vector<Complex> v) : group(std::move(g)), values(std::move(v)) {
    require(static_cast<Int>(values.size()) == group.order(), "function table size differs from the group order");
  }

  std::size_t size() const { return values.size(); }
  Complex operator[](std::size_t i) const { return values[i]; }
  Complex& operator[](std::size_t i) { return values[i]; }
  Complex at(const std::vector<Int>& x) const { return values[static_cast<std::size_t>(group.index_of(group.reduce(x)))]; }

  double max_modulus() const {
    double m = 0;
    for (auto z : values) m = std::max(m, std::abs(z));
    return m;
  }
  bool one_bounded(double tol = 1e-12) const { return max_modulus() <= 1.0 + tol; }
  void require_one_bounded(double tol = 1e-12) const { require(one_bounded(tol), "function is not 1-bounded"); }
};

/// x -> e(P(x)) on the group; P must be torus-valued and descend to it.
inline GroupFunction phase_function(const PolyMap& P, const FinAbGroup& group) {
  require(P.target().kind == TargetKind::Torus, "phase needs a torus-valued polynomial");
  require(P.dim() == 1, "phase needs a one-dimensional polynomial");
  require(descends_to_quotient(P, group.factors()), "polynomial does not descend to the group");
  GroupFunction f(group);
  for (Int i = 0; i < group.order(); ++i) f[static_cast<std::size_t>(i)] = e_of(P.eval(group.element_at(i))[0]);
  return f;
}

/// Index arithmetic on the row-major table of a group.
class IndexArith {
public:
  explicit IndexArith(const FinAbGroup& g) : g_(g), n_(static_cast<std::size_t>(g.order())) {
    const std::size_t r = g.rank();
    digits_.assign(r, std::vector<Int>(n_));
    stride_.assign(r, 1);
    for (std::size_t c = r; c-- > 1;) stride_[c - 1] = stride_[c] * g.factor(c);
    for (std::size_t i = 0; i < n_; ++i) {
      auto x = g.element_at(static_cast<Int>(i));
      for (std::size_t c = 0; c < r; ++c) digits_[c][i] = x[c];
    }
  }
  std::size_t add(std::size_t i, std::size_t j) const {
    Int idx = 0;
    for (std::size_t c = 0; c < digits_.size(); ++c) {
      Int s = digits_[c][i] + digits_[c][j];
      if (s >= g_.factor(c)) s -= g_.factor(c);
      idx += s * stride_[c];
    }
    return static_cast<std::size_t>(idx);
  }
  std::size_t neg(std::size_t i) const {
    Int idx = 0;
    for (std::size_t c = 0; c < digits_.size(); ++c) {
      Int s = digits_[c][i] == 0 ? 0 : g_.factor(c) - digits_[c][i];
      idx += s * stride_[c];
    }
    return static_cast<std::size_t>(idx);
  }
  Int digit(std::size_t c, std::size_t i) const { return digits_[c][i]; }
  Int stride(std::size_t c) const { return stride_[c]; }
  std::size_t size() const { return n_; }

private:
  const FinAbGroup& g_;
  std::size_t n_;
  std::vector<std::vector<Int>> digits_;
  std::vector<Int> stride_;
};

inline Complex mean(const std::vector<Complex>& v) {
  KahanSum<Complex> s;
  for (auto z : v) s.add(z);
  return s.value() / static_cast<double>(v.size());
}

/// E_x f(x) conj(g(x)).
inline Complex correlation(const GroupFunction& f, const GroupFunction& g) {
  require(f.group == g.group, "correlation of functions on different groups");
  KahanSum<Complex> s;
  for (std::size_t i = 0; i < f.size(); ++i) s.add(f[i] * std::conj(g[i]));
  return s.value() / static_cast<double>(f.size());
}

// ---------------------------------------------------------------------------
// Discrete Fourier transform

namespace detail {

// e(-k/n) for k < n, cached per thread.
inline const std::vector<Complex>& roots_of_unity(std::size_t n) {
  thread_local std::map<std::size_t, std::vector<Complex>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<Complex> W(n);
  for (std::size_t k = 0; k < n; ++k) W[k] = std::polar(1.0, -2.0 * std::numbers::pi * double(k) / double(n));
  return cache.emplace(n, std::move(W)).first->second;
}

inline std::size_t smallest_prime_factor(std::size_t n) {
  for (std::size_t q = 2; q * q <= n; ++q)
    if (n % q == 0) return q;
  return n;
}

// Out-of-place DFT X_k = sum_j x_j e(-jk/n) by recursive mixed-radix
// decimation in time, smallest prime factor first; prime lengths use the
// direct sum. W holds the roots e(-k/N) of the top-level length N and ws is
// N/n. `scratch` needs n entries and is free again on return.
inline void dft_rec(const Complex* in, std::size_t is, Complex* out, std::size_t n, const std::vector<Complex>& W,
                    std::size_t ws, Complex* scratch) {
  if (n == 1) {
    out[0] = in[0];
    return;
  }
  const std::size_t p = smallest_prime_factor(n);
  if (p == n) {
    for (std::size_t k = 0; k < n; ++k) {
      Complex s = in[0];
      std::size_t t = 0;  // j k mod n
      for (std::size_t j = 1; j < n; ++j) {
        t += k;
        if (t >= n) t -= n;
        s += in[j * is] * W[t * ws];
      }
      scratch[k] = s;
    }
    std::copy(scratch, scratch + n, out);
    return;
  }
  const std::size_t m = n / p;
  for (std::size_t r = 0; r < p; ++r) dft_rec(in + r * is, is * p, out + r * m, m, W, ws * p, scratch);
  if (p == 2) {
    for (std::size_t k = 0; k < m; ++k) {
      Complex a = out[k], b = out[m + k] * W[k * ws];
      out[k] = a + b;
      out[m + k] = a - b;
    }
    return;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t km = k % m;
    Complex s = out[km];
    std::size_t t = 0;  // r k mod n
    for (std::size_t r = 1; r < p; ++r) {
      t += k;
      if (t >= n) t -= n;
      s += out[r * m + km] * W[t * ws];
    }
    scratch[k] = s;
  }
  std::copy(scratch, scratch + n, out);
}

}  // namespace detail

/// f_hat(xi) = E_x f(x) e(-xi . x), xi . x = sum_i xi_i x_i / n_i, returned in
/// the same row-major order as the input.
inline GroupFunction fourier_transform(const GroupFunction& f) {
  GroupFunction out = f;
  const FinAbGroup& g = f.group;
  const std::size_t N = f.size();
  std::size_t stride = 1;
  for (std::size_t c = g.rank(); c-- > 0;) {
    const std::size_t n = static_cast<std::size_t>(g.factor(c));
    const std::vector<Complex>& W = detail::roots_of_unity(n);
    std::vector<Complex> line(n), res(n), scratch(n);
    // Lines along coordinate c: base = outer * n * stride + inner.
    for (std::size_t outer = 0; outer < N; outer += n * stride)
      for (std::size_t inner = 0; inner < stride; ++inner) {
        const std::size_t base = outer + inner;
        for (std::size_t j = 0; j < n; ++j) line[j] = out.values[base + j * stride];
        detail::dft_rec(line.data(), 1, res.data(), n, W, 1, scratch.data());
        for (std::size_t j = 0; j < n; ++j) out.values[base + j * stride] = res[j];
      }
    stride *= n;
  }
  for (auto& z : out.values) z /= static_cast<double>(N);
  return out;
}

/// Direct O(|Z|^2) transform, for checking the fast one.
inline GroupFunction fourier_transform_naive(const GroupFunction& f) {
  const FinAbGroup& g = f.group;
  GroupFunction out(g);
  for (Int xi = 0; xi < g.order(); ++xi) {
    auto a = g.element_at(xi);
    KahanSum<Complex> s;
    for (Int x = 0; x < g.order(); ++x) {
      auto b = g.element_at(x);
      Rational t(0);
      for (std::size_t i = 0; i < g.rank(); ++i) t += Rational(a[i] * b[i], g.factor(i));
      s.add(f[static_cast<std::size_t>(x)] * e_of(-t));
    }
    out[static_cast<std::size_t>(xi)] = s.value() / static_cast<double>(g.order());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gowers norms
//
// Normalization: uniform probability measure on Z,
//   ||f||_{U^d}^{2^d} = E_{x, h_1..h_d} prod_{w in {0,1}^d} C^{|w|} f(x + w.h),
// C complex conjugation. ||f||_{U^1} = |E f|.

enum class GowersMethod {
  Naive,          // the defining |Z|^{d+1} sum
  PureRecursive,  // E_h ||Delta_h f||^{2^{d-1}} down to |E f|^2
  Recursive,      // same recursion with the Fourier identity at d = 2
};

inline double u2_fourth_power_fourier(const GroupFunction& f) {
  GroupFunction F = fourier_transform(f);
  KahanSum<double> s;
  for (auto z : F.values) s.add(std::norm(z) * std::norm(z));
  return s.value();
}

/// ||f||_{U^2} via sum |f_hat|^4.
inline double gowers_u2_fourier(const GroupFunction& f) {
  return std::pow(std::max(0.0, u2_fourth_power_fourier(f)), 0.25);
}

namespace detail {

// Delta_h f(x) = f(x + h) conj(f(x)).
inline std::vector<Complex> multiplicative_derivative(const std::vector<Complex>& f, const IndexArith& ar,
                                                      std::size_t h) {
  std::vector<Complex> out(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) out[x] = f[ar.add(x, h)] * std::conj(f[x]);
  return out;
}

// ||f||_{U^d}^{2^d} by recursion on d.
inline double gowers_power(const std::vector<Complex>& f, const IndexArith& ar, const FinAbGroup& g, int d,
                           bool fourier_base) {
  if (d == 1) return std::norm(mean(f));
  if (d == 2 && fourier_base) return u2_fourth_power_fourier(GroupFunction(g, f));
  KahanSum<double> s;
  for (std::size_t h = 0; h < f.size(); ++h)
    s.add(gowers_power(multiplicative_derivative(f, ar, h), ar, g, d - 1, fourier_base));
  return s.value() / static_cast<double>(f.size());
}

inline double gowers_power_naive(const GroupFunction& f, int d) {
  IndexArith ar(f.group);
  const std::size_t N = f.size();
  const std::size_t V = std::size_t{1} << d;
  std::vector<std::size_t> h(d, 0);
  std::vector<std::size_t> pts(V);
  KahanSum<Complex> s;
  for (;;) {
    for (std::size_t x = 0; x < N; ++x) {
      Complex prod = 1;
      for (std::size_t w = 0; w < V; ++w) {
        std::size_t p = x;
        for (int i = 0; i < d; ++i)
          if ((w >> i) & 1) p = ar.add(p, h[i]);
        Complex v = f[p];
        prod *= (__builtin_popcountll(w) % 2) ? std::conj(v) : v;
      }
      s.add(prod);
    }
    int i = 0;
    while (i < d && ++h[i] == N) h[i++] = 0;
    if (i == d) break;
  }
  double total = std::pow(static_cast<double>(N), d + 1);
  return s.value().real() / total;
}

}  // namespace detail

/// Terms in the naive sum, |Z|^{d+1}, saturating at the Int range.
inline Int naive_gowers_terms(const FinAbGroup& g, int d) {
  Int t = 1;
  for (int i = 0; i <= d; ++i) {
    if (t > std::numeric_limits<Int>::max() / std::max<Int>(g.order(), 1)) return std::numeric_limits<Int>::max();
    t *= g.order();
  }
  return t;
}

/// ||f||_{U^d}, the nonnegative 2^d-th root of the averaged cube product.
/// The naive method throws BudgetError above `budget` terms.
inline double gowers_norm(const GroupFunction& f, int d, GowersMethod method = GowersMethod::Recursive,
                          Int budget = std::numeric_limits<Int>::max()) {
  require(d >= 1, "Gowers norm degree must be >= 1");
  double power = 0;
  if (method == GowersMethod::Naive) {
    if (naive_gowers_terms(f.group, d) > budget) throw BudgetError("naive Gowers sum exceeds the budget");
    power = detail::gowers_power_naive(f, d);
  } else {
    IndexArith ar(f.group);
    power = detail::gowers_power(f.values, ar, f.group, d, method == GowersMethod::Recursive);
  }
  return std::pow(std::max(0.0, power), 1.0 / std::pow(2.0, d));
}

}  // namespace nilext
