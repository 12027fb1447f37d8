#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "eqlevi/errors.hpp"
#include "eqlevi/exactmath/poly.hpp"
#include "eqlevi/exactmath/scalar.hpp"

namespace eqlevi {

/// Dense row-major matrix over any commutative ring type constructible from
/// an int (Scalar, Poly, Laurent).
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : r_(rows), c_(cols), a_(rows * cols, T(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  T& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

  Matrix transpose() const {
    Matrix t(c_, r_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  template <class F>
  auto map(F&& f) const -> Matrix<decltype(f(std::declval<const T&>()))> {
    Matrix<decltype(f(std::declval<const T&>()))> out(r_, c_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) out(i, j) = f((*this)(i, j));
    return out;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
  }
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  Matrix operator-() const {
    Matrix m = *this;
    for (auto& x : m.a_) x = -x;
    return m;
  }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.c_ != b.r_) throw InvalidInput("matrix shape mismatch in product");
    Matrix m(a.r_, b.c_);
    for (std::size_t i = 0; i < a.r_; ++i)
      for (std::size_t k = 0; k < a.c_; ++k) {
        const T& x = a(i, k);
        if (x == T(0)) continue;
        for (std::size_t j = 0; j < b.c_; ++j) m(i, j) += x * b(k, j);
      }
    return m;
  }
  friend Matrix operator*(const T& s, Matrix m) {
    for (auto& x : m.a_) x = s * x;
    return m;
  }
  friend Matrix operator*(Matrix m, const T& s) {
    for (auto& x : m.a_) x = x * s;
    return m;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.r_ == b.r_ && a.c_ == b.c_ && a.a_ == b.a_;
  }
  friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

  bool is_zero() const {
    for (const auto& x : a_)
      if (!(x == T(0))) return false;
    return true;
  }

  Matrix block(std::size_t i0, std::size_t j0, std::size_t nr, std::size_t nc) const {
    Matrix m(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) m(i, j) = (*this)(i0 + i, j0 + j);
    return m;
  }

  T trace() const {
    T s(0);
    for (std::size_t i = 0; i < std::min(r_, c_); ++i) s += (*this)(i, i);
    return s;
  }

 private:
  void check_same(const Matrix& o) const {
    if (r_ != o.r_ || c_ != o.c_) throw InvalidInput("matrix shape mismatch");
  }
  std::size_t r_ = 0, c_ = 0;
  std::vector<T> a_;
};

using ScalarMatrix = Matrix<Scalar>;
using ScalarVector = std::vector<Scalar>;

/// Determinant over a commutative ring by expansion along rows with
/// memoization over column subsets (n <= ~12).
template <class T>
T ring_determinant(const Matrix<T>& m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw InvalidInput("determinant of non-square matrix");
  if (n == 0) return T(1);
  // dp[mask] = determinant of the minor on the last popcount(mask) rows and
  // columns given by mask.
  std::vector<T> dp(std::size_t(1) << n, T(0));
  std::vector<bool> done(dp.size(), false);
  dp[0] = T(1);
  done[0] = true;
  for (std::size_t mask = 1; mask < dp.size(); ++mask) {
    const std::size_t k = static_cast<std::size_t>(__builtin_popcountll(mask));
    const std::size_t row = n - k;
    T acc(0);
    int sign = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (!(mask >> j & 1)) continue;
      const T& e = m(row, j);
      if (!(e == T(0))) {
        T term = e * dp[mask & ~(std::size_t(1) << j)];
        if (sign > 0)
          acc += term;
        else
          acc -= term;
      }
      sign = -sign;
    }
    dp[mask] = acc;
  }
  return dp.back();
}

/// Adjugate over a commutative ring: adj(m) * m = det(m) * I.
template <class T>
Matrix<T> ring_adjugate(const Matrix<T>& m) {
  const std::size_t n = m.rows();
  Matrix<T> adj(n, n);
  if (n == 1) {
    adj(0, 0) = T(1);
    return adj;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Matrix<T> minor(n - 1, n - 1);
      for (std::size_t r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (std::size_t c = 0, cc = 0; c < n; ++c) {
          if (c == j) continue;
          minor(rr, cc++) = m(r, c);
        }
        ++rr;
      }
      T d = ring_determinant(minor);
      adj(j, i) = ((i + j) % 2 == 0) ? d : T(0) - d;
    }
  return adj;
}

namespace linalg {

/// In-place reduced row echelon form; returns pivot columns.
inline std::vector<std::size_t> rref(ScalarMatrix& m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t p = row;
    while (p < m.rows() && m(p, col).is_zero()) ++p;
    if (p == m.rows()) continue;
    if (p != row)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
    const Scalar inv = m(row, col).inverse();
    for (std::size_t j = col; j < m.cols(); ++j) m(row, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col).is_zero()) continue;
      const Scalar f = m(i, col);
      for (std::size_t j = col; j < m.cols(); ++j)
        if (!m(row, j).is_zero()) m(i, j) -= f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

inline std::size_t rank(ScalarMatrix m) { return rref(m).size(); }

/// Basis of {x : m x = 0}.
inline std::vector<ScalarVector> nullspace(ScalarMatrix m) {
  auto piv = rref(m);
  std::vector<bool> is_piv(m.cols(), false);
  for (auto p : piv) is_piv[p] = true;
  std::vector<ScalarVector> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_piv[f]) continue;
    ScalarVector v(m.cols());
    v[f] = Scalar(1);
    for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -m(r, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

inline std::optional<ScalarMatrix> inverse(const ScalarMatrix& m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw InvalidInput("inverse of non-square matrix");
  ScalarMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = Scalar(1);
  }
  auto piv = rref(aug);
  if (piv.size() < n || piv[n - 1] != n - 1) return std::nullopt;
  return aug.block(0, n, n, n);
}

inline Scalar determinant(ScalarMatrix m) {
  const std::size_t n = m.rows();
  Scalar det(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = col;
    while (p < n && m(p, col).is_zero()) ++p;
    if (p == n) return Scalar(0);
    if (p != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(col, j));
      det = -det;
    }
    det *= m(col, col);
    const Scalar inv = m(col, col).inverse();
    for (std::size_t i = col + 1; i < n; ++i) {
      if (m(i, col).is_zero()) continue;
      const Scalar f = m(i, col) * inv;
      for (std::size_t j = col; j < n; ++j) m(i, j) -= f * m(col, j);
    }
  }
  return det;
}

/// Solves m x = b for one solution, if any.
inline std::optional<ScalarVector> solve(const ScalarMatrix& m, const ScalarVector& b) {
  ScalarMatrix aug(m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = b[i];
  }
  auto piv = rref(aug);
  if (!piv.empty() && piv.back() == m.cols()) return std::nullopt;
  ScalarVector x(m.cols());
  for (std::size_t r = 0; r < piv.size(); ++r) x[piv[r]] = aug(r, m.cols());
  return x;
}

/// Characteristic polynomial det(t I - m) by Faddeev-LeVerrier.
inline Poly charpoly(const ScalarMatrix& a) {
  const std::size_t n = a.rows();
  std::vector<Scalar> c(n + 1);
  c[n] = Scalar(1);
  ScalarMatrix mk(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    ScalarMatrix next = a * mk;
    for (std::size_t i = 0; i < n; ++i) next(i, i) += c[n - k + 1];
    mk = std::move(next);
    c[n - k] = -(a * mk).trace() / Scalar(static_cast<long>(k));
  }
  return Poly(std::move(c));
}

/// Column space basis (as column vectors) of m.
inline std::vector<ScalarVector> column_basis(const ScalarMatrix& m) {
  ScalarMatrix t = m.transpose();
  rref(t);
  std::vector<ScalarVector> out;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    ScalarVector v(t.cols());
    bool nz = false;
    for (std::size_t j = 0; j < t.cols(); ++j) {
      v[j] = t(i, j);
      nz = nz || !v[j].is_zero();
    }
    if (nz) out.push_back(std::move(v));
  }
  return out;
}

/// Evaluates a polynomial at a square matrix (Horner).
inline ScalarMatrix eval_poly(const Poly& p, const ScalarMatrix& a) {
  ScalarMatrix r(a.rows(), a.cols());
  for (std::size_t k = p.coeffs().size(); k-- > 0;) {
    r = r * a;
    for (std::size_t i = 0; i < a.rows(); ++i) r(i, i) += p.coeffs()[k];
  }
  return r;
}

}  // namespace linalg

}  // namespace eqlevi
