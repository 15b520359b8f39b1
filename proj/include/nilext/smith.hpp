#pragma once

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <vector>

#include "nilext/rational.hpp"

namespace nilext {

/// Dense row-major integer matrix with overflow-checked arithmetic.
class IntMatrix {
public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}
  IntMatrix(std::initializer_list<std::initializer_list<Int>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    for (const auto& row : init) {
      require(row.size() == cols_, "ragged matrix literal");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static IntMatrix from_rows(const std::vector<std::vector<Int>>& rows, std::size_t cols) {
    IntMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      require(rows[i].size() == cols, "ragged matrix rows");
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Int& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  Int operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<Int> row(std::size_t i) const {
    return {data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
            data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
  }
  std::vector<Int> col(std::size_t j) const {
    std::vector<Int> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  std::vector<std::vector<Int>> to_rows() const {
    std::vector<std::vector<Int>> out;
    for (std::size_t i = 0; i < rows_; ++i) out.push_back(row(i));
    return out;
  }

  IntMatrix transpose() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    require(a.cols_ == b.rows_, "matrix product shape mismatch");
    IntMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        Int aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          c(i, j) = checked_add(c(i, j), checked_mul(aik, b(k, j)));
      }
    return c;
  }

  std::vector<Int> apply(const std::vector<Int>& x) const {
    require(x.size() == cols_, "matrix-vector shape mismatch");
    std::vector<Int> y(rows_, 0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) y[i] = checked_add(y[i], checked_mul((*this)(i, j), x[j]));
    return y;
  }

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

  // Elementary operations used by the Smith reduction.
  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }
  // row[dst] += f * row[src]
  void add_row(std::size_t dst, std::size_t src, Int f) {
    if (f == 0) return;
    for (std::size_t j = 0; j < cols_; ++j)
      (*this)(dst, j) = checked_add((*this)(dst, j), checked_mul(f, (*this)(src, j)));
  }
  void add_col(std::size_t dst, std::size_t src, Int f) {
    if (f == 0) return;
    for (std::size_t i = 0; i < rows_; ++i)
      (*this)(i, dst) = checked_add((*this)(i, dst), checked_mul(f, (*this)(i, src)));
  }
  void negate_row(std::size_t r) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(r, j) = -(*this)(r, j);
  }
  void negate_col(std::size_t c) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, c) = -(*this)(i, c);
  }
  // Apply the 2x2 unimodular [[a,b],[c,d]] to rows (r1, r2).
  void mix_rows(std::size_t r1, std::size_t r2, Int a, Int b, Int c, Int d) {
    for (std::size_t j = 0; j < cols_; ++j) {
      Int x = (*this)(r1, j), y = (*this)(r2, j);
      (*this)(r1, j) = checked_add(checked_mul(a, x), checked_mul(b, y));
      (*this)(r2, j) = checked_add(checked_mul(c, x), checked_mul(d, y));
    }
  }
  void mix_cols(std::size_t c1, std::size_t c2, Int a, Int b, Int c, Int d) {
    for (std::size_t i = 0; i < rows_; ++i) {
      Int x = (*this)(i, c1), y = (*this)(i, c2);
      (*this)(i, c1) = checked_add(checked_mul(a, x), checked_mul(b, y));
      (*this)(i, c2) = checked_add(checked_mul(c, x), checked_mul(d, y));
    }
  }

  friend std::ostream& operator<<(std::ostream& os, const IntMatrix& m) {
    for (std::size_t i = 0; i < m.rows_; ++i) {
      os << "[";
      for (std::size_t j = 0; j < m.cols_; ++j) os << (j ? " " : "") << m(i, j);
      os << "]\n";
    }
    return os;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Int> data_;
};

/// Smith normal form U * A * V = D with U, V unimodular.
///
/// D is diagonal with nonnegative entries d_0 | d_1 | ... | d_{rank-1} and
/// zeros after the rank. The inverses of U and V are tracked alongside so
/// callers can move between coordinate systems in both directions.
struct SmithForm {
  IntMatrix D;
  IntMatrix U, U_inv;
  IntMatrix V, V_inv;
  std::size_t rank = 0;

  Int diag(std::size_t i) const { return i < std::min(D.rows(), D.cols()) ? D(i, i) : 0; }
};

namespace detail {

inline Wide wide_add(Wide a, Wide b) {
  Wide r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("Smith reduction overflow");
  return r;
}
inline Wide wide_mul(Wide a, Wide b) {
  Wide r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("Smith reduction overflow");
  return r;
}

// Dense matrix of 128-bit integers used while reducing.
struct WideMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<Wide> a;

  WideMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0) {}
  explicit WideMatrix(const IntMatrix& m) : WideMatrix(m.rows(), m.cols()) {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) at(i, j) = m(i, j);
  }
  static WideMatrix identity(std::size_t n) {
    WideMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }
  Wide& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  Wide at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  void swap_rows(std::size_t x, std::size_t y) {
    if (x != y)
      for (std::size_t j = 0; j < cols; ++j) std::swap(at(x, j), at(y, j));
  }
  void swap_cols(std::size_t x, std::size_t y) {
    if (x != y)
      for (std::size_t i = 0; i < rows; ++i) std::swap(at(i, x), at(i, y));
  }
  void add_row(std::size_t dst, std::size_t src, Wide f) {
    if (f != 0)
      for (std::size_t j = 0; j < cols; ++j) at(dst, j) = wide_add(at(dst, j), wide_mul(f, at(src, j)));
  }
  void add_col(std::size_t dst, std::size_t src, Wide f) {
    if (f != 0)
      for (std::size_t i = 0; i < rows; ++i) at(i, dst) = wide_add(at(i, dst), wide_mul(f, at(i, src)));
  }
  void negate_row(std::size_t r) {
    for (std::size_t j = 0; j < cols; ++j) at(r, j) = -at(r, j);
  }
  void negate_col(std::size_t c) {
    for (std::size_t i = 0; i < rows; ++i) at(i, c) = -at(i, c);
  }

  IntMatrix narrow() const {
    IntMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = detail::narrow(at(i, j));
    return m;
  }
};

// Nearest-integer quotient, so that |a - q b| <= |b| / 2.
inline Wide round_div(Wide a, Wide b) {
  Wide q = a / b, r = a % b;
  Wide ab = b < 0 ? -b : b;
  if (2 * (r < 0 ? -r : r) > ab) q += ((r < 0) == (b < 0)) ? 1 : -1;
  return q;
}

inline Wide wabs(Wide v) { return v < 0 ? -v : v; }

// Row/column operations are mirrored onto U (left) and V (right) together
// with their inverses: a row op R on A becomes U <- R U, U_inv <- U_inv R^-1.
struct SmithWork {
  WideMatrix A, U, Ui, V, Vi;
  Wide nmod = 0;  // lattice exponent mode, see smith_normal_form

  Wide reduce(Wide v) const {
    Wide r = v % nmod;
    if (2 * r > nmod) r -= nmod;
    if (2 * r < -nmod) r += nmod;
    return r;
  }

  void row_swap(std::size_t a, std::size_t b) {
    A.swap_rows(a, b);
    U.swap_rows(a, b);
    Ui.swap_cols(a, b);
  }
  void col_swap(std::size_t a, std::size_t b) {
    A.swap_cols(a, b);
    V.swap_cols(a, b);
    Vi.swap_rows(a, b);
  }
  void row_add(std::size_t dst, std::size_t src, Wide f) {
    A.add_row(dst, src, f);
    U.add_row(dst, src, f);
    Ui.add_col(src, dst, -f);
    if (nmod > 0)
      for (std::size_t j = 0; j < A.cols; ++j) A.at(dst, j) = reduce(A.at(dst, j));
  }
  void col_add(std::size_t dst, std::size_t src, Wide f) {
    A.add_col(dst, src, f);
    V.add_col(dst, src, f);
    Vi.add_row(src, dst, -f);
    if (nmod > 0) {
      for (std::size_t i = 0; i < A.rows; ++i) A.at(i, dst) = reduce(A.at(i, dst));
      for (std::size_t i = 0; i < V.rows; ++i) V.at(i, dst) = reduce(V.at(i, dst));
      for (std::size_t j = 0; j < Vi.cols; ++j) Vi.at(src, j) = reduce(Vi.at(src, j));
    }
  }
  void row_neg(std::size_t r) {
    A.negate_row(r);
    U.negate_row(r);
    Ui.negate_col(r);
  }
};

}  // namespace detail

// With track_left = false, U and U_inv are left empty; useful for tall
// relation matrices where only the column transform matters.
//
// Lattice exponent mode (exponent > 0, left side untracked): the row lattice
// is taken to be rowspan(A) + exponent * Z^n. Entries of A, V and V_inv are
// kept reduced modulo the exponent, the diagonal is replaced by
// gcd(d_i, exponent) and the rank is always full. V is then only invertible
// over Z/exponent, which is all a quotient of that lattice needs.
inline SmithForm smith_normal_form(const IntMatrix& A, bool track_left = true, Int exponent = 0) {
  require(exponent == 0 || !track_left, "lattice exponent mode does not track the left transform");
  const std::size_t m = A.rows(), n = A.cols();
  const std::size_t mu = track_left ? m : 0;
  detail::SmithWork w{detail::WideMatrix(A), detail::WideMatrix::identity(mu), detail::WideMatrix::identity(mu),
                      detail::WideMatrix::identity(n), detail::WideMatrix::identity(n), exponent};
  if (exponent > 0)
    for (auto& v : w.A.a) v = w.reduce(v);
  std::size_t t = 0;
  while (t < m && t < n) {
    // Pivot: smallest nonzero magnitude in the trailing block.
    std::size_t pi = m, pj = n;
    Wide best = 0;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < n; ++j) {
        Wide v = detail::wabs(w.A.at(i, j));
        if (v != 0 && (best == 0 || v < best)) {
          best = v;
          pi = i;
          pj = j;
        }
      }
    if (best == 0) break;
    w.row_swap(t, pi);
    w.col_swap(t, pj);

    for (;;) {
      // Reduce row t and column t by the pivot with nearest remainders, then
      // promote the smallest remainder left over.
      for (std::size_t i = t + 1; i < m; ++i)
        if (w.A.at(i, t) != 0) w.row_add(i, t, -detail::round_div(w.A.at(i, t), w.A.at(t, t)));
      for (std::size_t j = t + 1; j < n; ++j)
        if (w.A.at(t, j) != 0) w.col_add(j, t, -detail::round_div(w.A.at(t, j), w.A.at(t, t)));
      std::size_t ri = 0, cj = 0;
      Wide small = 0;
      for (std::size_t i = t + 1; i < m; ++i) {
        Wide v = detail::wabs(w.A.at(i, t));
        if (v != 0 && (small == 0 || v < small)) small = v, ri = i, cj = 0;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        Wide v = detail::wabs(w.A.at(t, j));
        if (v != 0 && (small == 0 || v < small)) small = v, ri = 0, cj = j;
      }
      if (small != 0) {
        if (ri != 0) w.row_swap(t, ri);
        else w.col_swap(t, cj);
        continue;
      }
      // Divisibility: fold a row holding an entry not divisible by the pivot.
      Wide piv = w.A.at(t, t);
      bool folded = false;
      for (std::size_t i = t + 1; i < m && !folded; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (w.A.at(i, j) % piv != 0) {
            w.row_add(t, i, 1);
            folded = true;
            break;
          }
      if (!folded) break;
    }
    if (w.A.at(t, t) < 0) w.row_neg(t);
    ++t;
  }
  if (exponent > 0) {
    // Pad with exponent rows so D stays square-diagonal on the first n rows.
    detail::WideMatrix D(std::max(m, n), n);
    for (std::size_t i = 0; i < n; ++i) D.at(i, i) = i < t ? detail::wide_gcd(w.A.at(i, i), exponent) : exponent;
    w.A = D;
    t = n;
  }
  SmithForm out;
  out.rank = t;
  out.D = w.A.narrow();
  out.U = w.U.narrow();
  out.U_inv = w.Ui.narrow();
  out.V = w.V.narrow();
  out.V_inv = w.Vi.narrow();
  return out;
}

/// Integer solution of A y = b, if one exists.
inline std::optional<std::vector<Int>> solve_integer(const IntMatrix& A, const std::vector<Int>& b) {
  require(b.size() == A.rows(), "solve_integer: rhs size mismatch");
  SmithForm s = smith_normal_form(A);
  std::vector<Int> ub = s.U.apply(b);
  std::vector<Int> z(A.cols(), 0);
  for (std::size_t i = 0; i < ub.size(); ++i) {
    Int d = s.diag(i);
    if (i < s.rank) {
      if (ub[i] % d != 0) return std::nullopt;
      z[i] = ub[i] / d;
    } else if (ub[i] != 0) {
      return std::nullopt;
    }
  }
  return s.V.apply(z);
}

/// Basis of the integer kernel {y : A y = 0}, as columns of the result.
inline IntMatrix integer_kernel(const IntMatrix& A) {
  SmithForm s = smith_normal_form(A);
  IntMatrix K(A.cols(), A.cols() - s.rank);
  for (std::size_t j = s.rank; j < A.cols(); ++j)
    for (std::size_t i = 0; i < A.cols(); ++i) K(i, j - s.rank) = s.V(i, j);
  return K;
}

}  // namespace nilext
