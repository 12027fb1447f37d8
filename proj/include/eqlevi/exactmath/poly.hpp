#pragma once

#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "eqlevi/errors.hpp"
#include "eqlevi/exactmath/scalar.hpp"

namespace eqlevi {

/// Dense univariate polynomial over Scalar; trailing zeros are trimmed so the
/// zero polynomial has no coefficients and degree -1.
class Poly {
 public:
  Poly() = default;
  Poly(int c) : Poly(Scalar(c)) {}  // NOLINT
  Poly(const Scalar& c) {           // NOLINT
    if (!c.is_zero()) c_.push_back(c);
  }
  explicit Poly(std::vector<Scalar> coeffs) : c_(std::move(coeffs)) { trim(); }

  static Poly monomial(const Scalar& c, int deg) {
    if (c.is_zero()) return {};
    std::vector<Scalar> v(static_cast<std::size_t>(deg) + 1);
    v[static_cast<std::size_t>(deg)] = c;
    return Poly(std::move(v));
  }
  /// The polynomial t.
  static Poly x() { return monomial(Scalar(1), 1); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Scalar>& coeffs() const { return c_; }
  Scalar coeff(int k) const {
    if (k < 0 || k > degree()) return Scalar(0);
    return c_[static_cast<std::size_t>(k)];
  }
  Scalar leading() const { return c_.empty() ? Scalar(0) : c_.back(); }

  Poly monic() const {
    if (is_zero()) return *this;
    Scalar inv = leading().inverse();
    Poly r = *this;
    for (auto& x : r.c_) x *= inv;
    return r;
  }

  Poly operator-() const {
    Poly r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  Poly& operator+=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Scalar> r(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i].is_zero()) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j)
        if (!b.c_[j].is_zero()) r[i + j] += a.c_[i] * b.c_[j];
    }
    return Poly(std::move(r));
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }
  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  /// Euclidean division; divisor must be nonzero.
  static std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw InvalidInput("polynomial division by zero");
    if (a.degree() < b.degree()) return {Poly(), a};
    std::vector<Scalar> rem = a.c_;
    std::vector<Scalar> q(a.c_.size() - b.c_.size() + 1);
    const Scalar inv = b.leading().inverse();
    const std::size_t db = b.c_.size() - 1;
    for (std::size_t k = rem.size(); k-- > db;) {
      if (rem[k].is_zero()) continue;
      Scalar f = rem[k] * inv;
      q[k - db] = f;
      for (std::size_t j = 0; j <= db; ++j) rem[k - db + j] -= f * b.c_[j];
    }
    return {Poly(std::move(q)), Poly(std::move(rem))};
  }
  friend Poly operator/(const Poly& a, const Poly& b) { return divmod(a, b).first; }
  friend Poly operator%(const Poly& a, const Poly& b) { return divmod(a, b).second; }

  /// Monic gcd (zero if both inputs are zero).
  static Poly gcd(Poly a, Poly b) {
    while (!b.is_zero()) {
      Poly r = a % b;
      a = std::move(b);
      b = std::move(r);
    }
    return a.monic();
  }

  /// Returns (g, s, t) with s*a + t*b = g, g monic.
  static std::tuple<Poly, Poly, Poly> gcdext(const Poly& a0, const Poly& b0) {
    Poly a = a0, b = b0, s0(1), s1, t0, t1(1);
    while (!b.is_zero()) {
      auto [q, r] = divmod(a, b);
      Poly s2 = s0 - q * s1, t2 = t0 - q * t1;
      a = std::move(b);
      b = std::move(r);
      s0 = std::move(s1);
      s1 = std::move(s2);
      t0 = std::move(t1);
      t1 = std::move(t2);
    }
    if (a.is_zero()) return {a, s0, t0};
    Scalar inv = a.leading().inverse();
    return {a * Poly(inv), s0 * Poly(inv), t0 * Poly(inv)};
  }

  Poly derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Scalar> r(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * Scalar(static_cast<long>(i));
    return Poly(std::move(r));
  }

  Scalar operator()(const Scalar& x) const {
    Scalar r(0);
    for (std::size_t k = c_.size(); k-- > 0;) r = r * x + c_[k];
    return r;
  }

  /// p(q(t)).
  Poly compose(const Poly& q) const {
    Poly r;
    for (std::size_t k = c_.size(); k-- > 0;) r = r * q + Poly(c_[k]);
    return r;
  }

  Poly pow(int e) const {
    Poly r(1), b = *this;
    while (e > 0) {
      if (e & 1) r *= b;
      b *= b;
      e >>= 1;
    }
    return r;
  }

  /// Human-readable form in the given variable, highest degree first.
  std::string to_string(const std::string& var = "t") const {
    if (is_zero()) return "0";
    std::string s;
    for (std::size_t k = c_.size(); k-- > 0;) {
      if (c_[k].is_zero()) continue;
      std::string cs = c_[k].to_string();
      if (!s.empty()) s += " + ";
      if (k == 0) {
        s += cs;
      } else {
        if (!c_[k].is_one()) s += (c_[k].is_rational() ? cs : "(" + cs + ")") + "*";
        s += var;
        if (k > 1) s += "^" + std::to_string(k);
      }
    }
    return s;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
  std::vector<Scalar> c_;
};

/// Squarefree decomposition (Yun): monic pairwise coprime squarefree factors
/// with multiplicities, product equal to p up to its leading coefficient.
inline std::vector<std::pair<Poly, int>> poly_squarefree_split(const Poly& p) {
  if (p.is_zero()) throw InvalidInput("zero input");
  std::vector<std::pair<Poly, int>> out;
  if (p.degree() == 0) return out;
  Poly f = p.monic();
  Poly fp = f.derivative();
  Poly a = Poly::gcd(f, fp);
  Poly b = f / a;
  Poly c = fp / a;
  Poly d = c - b.derivative();
  int i = 1;
  while (b.degree() > 0) {
    Poly g = Poly::gcd(b, d);
    if (g.degree() > 0) out.emplace_back(g, i);
    b = b / g;
    c = d / g;
    d = c - b.derivative();
    ++i;
  }
  return out;
}

}  // namespace eqlevi
