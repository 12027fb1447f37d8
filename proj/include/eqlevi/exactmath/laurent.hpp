#pragma once

#include <array>
#include <map>
#include <string>

#include "eqlevi/errors.hpp"
#include "eqlevi/exactmath/matrix.hpp"
#include "eqlevi/exactmath/poly.hpp"
#include "eqlevi/exactmath/scalar.hpp"

namespace eqlevi {

/// Sparse Laurent polynomial in N variables over Scalar. Zero coefficients
/// are never stored.
template <std::size_t N>
class Laurent {
 public:
  using Exponent = std::array<int, N>;
  using Terms = std::map<Exponent, Scalar>;

  Laurent() = default;
  Laurent(int c) : Laurent(Scalar(c)) {}  // NOLINT
  Laurent(const Scalar& c) {              // NOLINT
    if (!c.is_zero()) t_[Exponent{}] = c;
  }

  static Laurent monomial(const Scalar& c, const Exponent& e) {
    Laurent l;
    if (!c.is_zero()) l.t_[e] = c;
    return l;
  }
  /// The single variable `var` raised to `power`.
  static Laurent var(std::size_t v, int power = 1) {
    Exponent e{};
    e[v] = power;
    return monomial(Scalar(1), e);
  }

  const Terms& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  Scalar coeff(const Exponent& e) const {
    auto it = t_.find(e);
    return it == t_.end() ? Scalar(0) : it->second;
  }
  void add_term(const Exponent& e, const Scalar& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = t_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) t_.erase(it);
    }
  }

  int min_exp(std::size_t v) const {
    int m = 0;
    bool first = true;
    for (const auto& [e, c] : t_) {
      if (first || e[v] < m) m = e[v];
      first = false;
    }
    return m;
  }
  int max_exp(std::size_t v) const {
    int m = 0;
    bool first = true;
    for (const auto& [e, c] : t_) {
      if (first || e[v] > m) m = e[v];
      first = false;
    }
    return m;
  }

  Laurent operator-() const {
    Laurent r = *this;
    for (auto& [e, c] : r.t_) c = -c;
    return r;
  }
  Laurent& operator+=(const Laurent& o) {
    for (const auto& [e, c] : o.t_) add_term(e, c);
    return *this;
  }
  Laurent& operator-=(const Laurent& o) {
    for (const auto& [e, c] : o.t_) add_term(e, -c);
    return *this;
  }
  friend Laurent operator+(Laurent a, const Laurent& b) { return a += b; }
  friend Laurent operator-(Laurent a, const Laurent& b) { return a -= b; }
  friend Laurent operator*(const Laurent& a, const Laurent& b) {
    Laurent r;
    for (const auto& [ea, ca] : a.t_)
      for (const auto& [eb, cb] : b.t_) {
        Exponent e;
        for (std::size_t k = 0; k < N; ++k) e[k] = ea[k] + eb[k];
        r.add_term(e, ca * cb);
      }
    return r;
  }
  Laurent& operator*=(const Laurent& o) { return *this = *this * o; }
  friend bool operator==(const Laurent& a, const Laurent& b) { return a.t_ == b.t_; }
  friend bool operator!=(const Laurent& a, const Laurent& b) { return !(a == b); }

  Laurent pow(int k) const {
    if (k < 0) throw InvalidInput("negative power of a Laurent polynomial");
    Laurent r(1), b = *this;
    while (k) {
      if (k & 1) r *= b;
      b *= b;
      k >>= 1;
    }
    return r;
  }

  /// Partial derivative in variable v.
  Laurent derivative(std::size_t v) const {
    Laurent r;
    for (const auto& [e, c] : t_) {
      if (e[v] == 0) continue;
      Exponent f = e;
      f[v] -= 1;
      r.add_term(f, c * Scalar(e[v]));
    }
    return r;
  }

  /// Substitutes a scalar for variable v; the variable's slot becomes zero.
  Laurent substitute(std::size_t v, const Scalar& x) const {
    Laurent r;
    for (const auto& [e, c] : t_) {
      Exponent f = e;
      f[v] = 0;
      r.add_term(f, c * x.pow(e[v]));
    }
    return r;
  }

  /// Rewrites every monomial through `f`, which maps a single term to a
  /// Laurent polynomial (possibly in more variables).
  template <std::size_t M, class F>
  Laurent<M> transform(F&& f) const {
    Laurent<M> r;
    for (const auto& [e, c] : t_) r += f(e, c);
    return r;
  }

  bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first == Exponent{}); }
  Scalar constant_term() const { return coeff(Exponent{}); }

 private:
  Terms t_;
};

using Laurent1 = Laurent<1>;
using Laurent2 = Laurent<2>;
using Laurent3 = Laurent<3>;
using LaurentMatrix = Matrix<Laurent1>;

/// Polynomial (nonnegative exponents) in one variable to Laurent form.
inline Laurent1 to_laurent(const Poly& p, int shift = 0) {
  Laurent1 l;
  for (int k = 0; k <= p.degree(); ++k) l.add_term({k + shift}, p.coeff(k));
  return l;
}

/// Polynomial in w = 1/z, written as a Laurent polynomial in z.
inline Laurent1 to_laurent_inverted(const Poly& p) {
  Laurent1 l;
  for (int k = 0; k <= p.degree(); ++k) l.add_term({-k}, p.coeff(k));
  return l;
}

/// z^shift * l as a polynomial; throws if a negative exponent remains.
inline Poly to_poly(const Laurent1& l, int shift = 0) {
  if (l.is_zero()) return {};
  if (l.min_exp(0) + shift < 0) throw InvalidInput("negative exponent in polynomial conversion");
  std::vector<Scalar> c(static_cast<std::size_t>(l.max_exp(0) + shift) + 1);
  for (const auto& [e, v] : l.terms()) c[static_cast<std::size_t>(e[0] + shift)] = v;
  return Poly(std::move(c));
}

inline Scalar evaluate(const Laurent1& l, const Scalar& z) {
  Scalar s(0);
  for (const auto& [e, c] : l.terms()) s += c * z.pow(e[0]);
  return s;
}

inline LaurentMatrix to_laurent(const Matrix<Poly>& m) {
  return m.map([](const Poly& p) { return to_laurent(p); });
}
inline LaurentMatrix to_laurent_inverted(const Matrix<Poly>& m) {
  return m.map([](const Poly& p) { return to_laurent_inverted(p); });
}

/// Monomial determinant c*z^k of a Laurent matrix, if the determinant has
/// that shape.
struct MonomialDet {
  Scalar coeff;
  int exponent = 0;
};

inline std::optional<MonomialDet> monomial_determinant(const LaurentMatrix& m) {
  Laurent1 d = ring_determinant(m);
  if (d.terms().size() != 1) return std::nullopt;
  return MonomialDet{d.terms().begin()->second, d.terms().begin()->first[0]};
}

}  // namespace eqlevi
