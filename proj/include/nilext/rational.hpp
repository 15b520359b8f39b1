#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "nilext/errors.hpp"

namespace nilext {

using Int = std::int64_t;
using Wide = __int128;

namespace detail {

inline Int narrow(Wide v) {
  if (v > static_cast<Wide>(INT64_MAX) || v < -static_cast<Wide>(INT64_MAX))
    throw OverflowError("integer result exceeds the 64-bit cap");
  return static_cast<Int>(v);
}

inline Wide wide_gcd(Wide a, Wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace detail

inline Int checked_add(Int a, Int b) { return detail::narrow(Wide(a) + Wide(b)); }
inline Int checked_sub(Int a, Int b) { return detail::narrow(Wide(a) - Wide(b)); }
inline Int checked_mul(Int a, Int b) { return detail::narrow(Wide(a) * Wide(b)); }

// Least nonnegative residue; m > 0.
inline Int mod(Int a, Int m) {
  Int r = a % m;
  return r < 0 ? r + m : r;
}

inline Int gcd(Int a, Int b) { return std::gcd(a, b); }

inline Int lcm(Int a, Int b) {
  if (a == 0 || b == 0) return 0;
  return checked_mul(a / std::gcd(a, b), b < 0 ? -b : b);
}

// Extended gcd: returns g = gcd(a,b) >= 0 with a*x + b*y = g.
inline Int ext_gcd(Int a, Int b, Int& x, Int& y) {
  Int x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    Int q = a / b;
    Int t = a - q * b;
    a = b;
    b = t;
    t = x0 - q * x1;
    x0 = x1;
    x1 = t;
    t = y0 - q * y1;
    y0 = y1;
    y1 = t;
  }
  if (a < 0) {
    a = -a;
    x0 = -x0;
    y0 = -y0;
  }
  x = x0;
  y = y0;
  return a;
}

inline bool is_prime(Int n) {
  if (n < 2) return false;
  for (Int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline Int factorial(int n) {
  Int r = 1;
  for (int i = 2; i <= n; ++i) r = checked_mul(r, i);
  return r;
}

/// Exact rational number with 64-bit numerator and denominator.
///
/// Always stored reduced with a positive denominator. Every operation is
/// computed in 128-bit intermediates and throws OverflowError when the
/// reduced result does not fit; there is no silent rounding anywhere.
class Rational {
public:
  constexpr Rational() = default;
  constexpr Rational(Int n) : num_(n), den_(1) {}  // NOLINT: implicit from integers
  Rational(Int n, Int d) { assign(Wide(n), Wide(d)); }

  static Rational from_wide(Wide n, Wide d) {
    Rational r;
    r.assign(n, d);
    return r;
  }

  Int num() const { return num_; }
  Int den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }

  // Largest integer <= value.
  Int floor() const {
    Int q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }

  // Representative in [0, 1).
  Rational frac() const { return from_wide(Wide(mod(num_, den_)), Wide(den_)); }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  Rational operator-() const { return from_wide(-Wide(num_), Wide(den_)); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    if (a.den_ == b.den_) return from_wide(Wide(a.num_) + Wide(b.num_), Wide(a.den_));
    return from_wide(Wide(a.num_) * b.den_ + Wide(b.num_) * a.den_, Wide(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    if (a.num_ == 0 || b.num_ == 0) return Rational();
    // Cross-reduce first to keep intermediates small.
    Int g1 = std::gcd(a.num_, b.den_);
    Int g2 = std::gcd(b.num_, a.den_);
    return from_wide(Wide(a.num_ / g1) * (b.num_ / g2), Wide(a.den_ / g2) * (b.den_ / g1));
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw PreconditionError("rational division by zero");
    return a * from_wide(Wide(b.den_), Wide(b.num_));
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return Wide(a.num_) * b.den_ <=> Wide(b.num_) * a.den_;
  }

  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  // Accepts "n" or "n/d".
  static Rational parse(std::string_view s) {
    auto to_int = [](std::string_view t) -> Int {
      if (t.empty()) throw PreconditionError("empty rational component");
      std::size_t pos = 0;
      Int v = 0;
      try {
        v = std::stoll(std::string(t), &pos);
      } catch (const std::exception&) {
        throw PreconditionError("malformed rational '" + std::string(t) + "'");
      }
      if (pos != t.size()) throw PreconditionError("malformed rational '" + std::string(t) + "'");
      return v;
    };
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return Rational(to_int(s));
    return Rational(to_int(s.substr(0, slash)), to_int(s.substr(slash + 1)));
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& q) { return os << q.str(); }

private:
  void assign(Wide n, Wide d) {
    if (d == 0) throw PreconditionError("zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    Wide g = detail::wide_gcd(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    num_ = detail::narrow(n);
    den_ = detail::narrow(d);
  }

  Int num_ = 0;
  Int den_ = 1;
};

/// Point of the circle T = R/Z, held as its representative in [0, 1).
class TorusPoint {
public:
  TorusPoint() = default;
  explicit TorusPoint(const Rational& q) : value_(q.frac()) {}

  const Rational& value() const { return value_; }

  friend TorusPoint operator+(const TorusPoint& a, const TorusPoint& b) {
    return TorusPoint(a.value_ + b.value_);
  }
  friend TorusPoint operator-(const TorusPoint& a, const TorusPoint& b) {
    return TorusPoint(a.value_ - b.value_);
  }
  TorusPoint operator-() const { return TorusPoint(-value_); }
  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;

  friend std::ostream& operator<<(std::ostream& os, const TorusPoint& t) { return os << t.value_; }

private:
  Rational value_;
};

// Generalized binomial coefficient binom(q, j) = q(q-1)...(q-j+1)/j!.
inline Rational binom(const Rational& q, int j) {
  if (j < 0) return Rational(0);
  Rational r(1);
  for (int i = 0; i < j; ++i) r = r * (q - Rational(i)) / Rational(i + 1);
  return r;
}

// Integer binomial, exact; negative n handled through the generalized form.
inline Int binom_int(Int n, int j) {
  Rational r = binom(Rational(n), j);
  return r.num();
}

}  // namespace nilext
