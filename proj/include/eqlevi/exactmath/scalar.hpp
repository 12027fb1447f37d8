#pragma once

// Exact elements of cyclotomic fields Q(zeta_m).
//
// An element is stored as the coefficient vector of a polynomial in zeta_m
// of degree < phi(m), reduced modulo the m-th cyclotomic polynomial.
// Rational elements are always normalized to conductor 1, so the rational
// fast path never touches the cyclotomic tables.

#include <gmpxx.h>

#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "eqlevi/errors.hpp"

namespace eqlevi {

using Rational = mpq_class;

namespace detail {

using QPoly = std::vector<Rational>;

inline void qtrim(QPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline QPoly qmul(const QPoly& a, const QPoly& b) {
  if (a.empty() || b.empty()) return {};
  QPoly r(a.size() + b.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  qtrim(r);
  return r;
}

inline QPoly qsub(QPoly a, const QPoly& b) {
  if (a.size() < b.size()) a.resize(b.size(), Rational(0));
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  qtrim(a);
  return a;
}

// Division with remainder; b must be nonzero.
inline void qdivmod(QPoly a, const QPoly& b, QPoly& q, QPoly& r) {
  qtrim(a);
  q.clear();
  if (a.size() < b.size()) {
    r = a;
    return;
  }
  q.assign(a.size() - b.size() + 1, Rational(0));
  const Rational& lead = b.back();
  for (std::size_t k = a.size(); k-- >= b.size();) {
    if (a[k] == 0) {
      if (k == 0) break;
      continue;
    }
    Rational f = a[k] / lead;
    q[k - b.size() + 1] = f;
    for (std::size_t j = 0; j < b.size(); ++j) a[k - b.size() + 1 + j] -= f * b[j];
    if (k == 0) break;
  }
  qtrim(a);
  qtrim(q);
  r = a;
}

inline QPoly qmod(const QPoly& a, const QPoly& b) {
  QPoly q, r;
  qdivmod(a, b, q, r);
  return r;
}

inline const QPoly& cyclotomic_unlocked(int m, std::map<int, QPoly>& cache) {
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  QPoly num(static_cast<std::size_t>(m) + 1, Rational(0));
  num[0] = -1;
  num[static_cast<std::size_t>(m)] = 1;
  for (int d = 1; d < m; ++d) {
    if (m % d != 0) continue;
    QPoly q, r;
    qdivmod(num, cyclotomic_unlocked(d, cache), q, r);
    num = q;
  }
  return cache.emplace(m, num).first->second;
}

// Cyclotomic polynomial Phi_m, memoized.  Map nodes are never erased, so the
// returned reference stays valid after the lock is released.
inline const QPoly& cyclotomic_poly(int m) {
  static std::mutex mu;
  static std::map<int, QPoly> cache;
  std::lock_guard<std::mutex> lock(mu);
  return cyclotomic_unlocked(m, cache);
}

inline int euler_phi(int m) {
  int r = m;
  for (int p = 2; p * p <= m; ++p) {
    if (m % p == 0) {
      while (m % p == 0) m /= p;
      r -= r / p;
    }
  }
  if (m > 1) r -= r / m;
  return r;
}

// Q(zeta_2k) = Q(zeta_k) for odd k; use the smaller label.
inline int canonical_conductor(int m) { return (m % 4 == 2) ? m / 2 : m; }

}  // namespace detail

class Scalar {
 public:
  Scalar() : c_{Rational(0)} {}
  Scalar(int v) : c_{Rational(v)} {}  // NOLINT: implicit by design of numeric literals
  Scalar(long v) : c_{Rational(v)} {}  // NOLINT
  Scalar(Rational v) : c_{std::move(v)} {}  // NOLINT

  /// Builds an element of Q(zeta_m) from power-basis coordinates.
  Scalar(int m, std::vector<Rational> coeffs) : m_(m), c_(std::move(coeffs)) {
    if (m < 1) throw InvalidInput("conductor must be positive");
    to_canonical_conductor();
    const int phi = detail::euler_phi(m_);
    if (static_cast<int>(c_.size()) > phi) {
      detail::QPoly p = c_;
      detail::qtrim(p);
      p = detail::qmod(p, detail::cyclotomic_poly(m_));
      c_ = p;
    }
    c_.resize(static_cast<std::size_t>(phi), Rational(0));
    normalize();
  }

  /// zeta_m^k.
  static Scalar zeta(int m, long k = 1) {
    if (m < 1) throw InvalidInput("conductor must be positive");
    k %= m;
    if (k < 0) k += m;
    std::vector<Rational> c(static_cast<std::size_t>(k) + 1, Rational(0));
    c[static_cast<std::size_t>(k)] = 1;
    return Scalar(m, std::move(c));
  }

  int conductor() const { return m_; }
  const std::vector<Rational>& coeffs() const { return c_; }
  bool is_rational() const { return m_ == 1; }
  const Rational& rational() const { return c_[0]; }
  bool is_zero() const { return m_ == 1 && c_[0] == 0; }
  bool is_one() const { return m_ == 1 && c_[0] == 1; }

  /// Image under Q(zeta_m) -> Q(zeta_M), m | M.
  Scalar embed(int M) const {
    M = detail::canonical_conductor(M);
    if (M % m_ != 0) throw InvalidInput("embedding requires conductor divisibility");
    return embed_raw(M);
  }

  Scalar operator-() const {
    Scalar r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }

  Scalar& operator+=(const Scalar& o) {
    if (m_ == 1 && o.m_ == 1) {
      c_[0] += o.c_[0];
      return *this;
    }
    const int M = lcm(m_, o.m_);
    Scalar a = embed_raw(M), b = o.embed_raw(M);
    for (std::size_t i = 0; i < a.c_.size(); ++i) a.c_[i] += b.c_[i];
    *this = std::move(a);
    normalize();
    return *this;
  }

  Scalar& operator-=(const Scalar& o) { return *this += -o; }

  Scalar& operator*=(const Scalar& o) {
    if (m_ == 1 && o.m_ == 1) {
      c_[0] *= o.c_[0];
      return *this;
    }
    if (o.m_ == 1) {
      for (auto& x : c_) x *= o.c_[0];
      normalize();
      return *this;
    }
    if (m_ == 1) {
      Rational f = c_[0];
      *this = o;
      for (auto& x : c_) x *= f;
      normalize();
      return *this;
    }
    const int M = lcm(m_, o.m_);
    Scalar a = embed_raw(M), b = o.embed_raw(M);
    detail::QPoly pa = a.c_, pb = b.c_;
    detail::qtrim(pa);
    detail::qtrim(pb);
    detail::QPoly prod = detail::qmod(detail::qmul(pa, pb), detail::cyclotomic_poly(M));
    m_ = M;
    c_ = std::move(prod);
    c_.resize(static_cast<std::size_t>(detail::euler_phi(M)), Rational(0));
    normalize();
    return *this;
  }

  Scalar inverse() const {
    if (is_zero()) throw InvalidInput("division by zero scalar");
    if (m_ == 1) return Scalar(Rational(1) / c_[0]);
    // Extended Euclid of (a, Phi_m) over Q.
    detail::QPoly a = c_;
    detail::qtrim(a);
    detail::QPoly b = detail::cyclotomic_poly(m_);
    detail::QPoly s0{Rational(1)}, s1{};
    while (!b.empty()) {
      detail::QPoly q, r;
      detail::qdivmod(a, b, q, r);
      detail::QPoly s2 = detail::qsub(s0, detail::qmul(q, s1));
      a = b;
      b = r;
      s0 = s1;
      s1 = s2;
    }
    // a is a nonzero constant since Phi_m is irreducible.
    Rational g = a[0];
    for (auto& x : s0) x /= g;
    return Scalar(m_, s0);
  }

  Scalar& operator/=(const Scalar& o) { return *this *= o.inverse(); }

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

  friend bool operator==(const Scalar& a, const Scalar& b) {
    if (a.m_ == b.m_) return a.c_ == b.c_;
    const int M = lcm(a.m_, b.m_);
    return a.embed_raw(M).c_ == b.embed_raw(M).c_;
  }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

  Scalar pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    Scalar r(1), b = *this;
    while (e) {
      if (e & 1) r *= b;
      b *= b;
      e >>= 1;
    }
    return r;
  }

  /// "p/q" for rationals, "[m; c0, c1, ...]" otherwise.
  std::string to_string() const {
    if (m_ == 1) return c_[0].get_str();
    std::string s = "[" + std::to_string(m_) + ";";
    for (std::size_t i = 0; i < c_.size(); ++i) s += (i ? ", " : " ") + c_[i].get_str();
    return s + "]";
  }

  static Scalar parse(const std::string& text) {
    std::string t;
    for (char ch : text)
      if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
    if (t.empty()) throw InvalidInput("empty scalar string");
    if (t.front() == '[') {
      if (t.back() != ']') throw InvalidInput("bad cyclotomic scalar: " + text);
      auto semi = t.find(';');
      if (semi == std::string::npos) throw InvalidInput("bad cyclotomic scalar: " + text);
      int m = 0;
      try {
        m = std::stoi(t.substr(1, semi - 1));
      } catch (const std::exception&) {
        throw InvalidInput("bad conductor in scalar: " + text);
      }
      std::vector<Rational> cs;
      std::string body = t.substr(semi + 1, t.size() - semi - 2);
      std::stringstream ss(body);
      std::string item;
      while (std::getline(ss, item, ',')) cs.push_back(parse_rational(item, text));
      if (m < 1 || static_cast<int>(cs.size()) != detail::euler_phi(m))
        throw InvalidInput("cyclotomic scalar needs phi(m) coefficients: " + text);
      return Scalar(m, std::move(cs));
    }
    return Scalar(parse_rational(t, text));
  }

  friend std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.to_string(); }

 private:
  static int lcm(int a, int b) { return detail::canonical_conductor(std::lcm(a, b)); }

  static Rational parse_rational(const std::string& s, const std::string& ctx) {
    if (s.empty()) throw InvalidInput("bad rational in scalar: " + ctx);
    for (char ch : s)
      if (!(std::isdigit(static_cast<unsigned char>(ch)) || ch == '-' || ch == '/' || ch == '+'))
        throw InvalidInput("bad rational in scalar: " + ctx);
    Rational r;
    std::string u = (s[0] == '+') ? s.substr(1) : s;
    if (r.set_str(u, 10) != 0) throw InvalidInput("bad rational in scalar: " + ctx);
    if (u.find('/') != std::string::npos && r.get_den() == 0) throw InvalidInput("zero denominator: " + ctx);
    r.canonicalize();
    return r;
  }

  void to_canonical_conductor() {
    if (m_ % 4 == 2) {
      // zeta_2k = -zeta_k^((k+1)/2) for odd k.
      const int k = m_ / 2;
      Scalar z = -zeta(k, (k + 1) / 2);
      Scalar acc(0), pw(1);
      for (const auto& c : c_) {
        acc += pw * Scalar(c);
        pw *= z;
      }
      *this = acc;
    }
  }

  // Representation in Q(zeta_M) without normalization; m | M required.
  Scalar embed_raw(int M) const {
    if (m_ == M) return *this;
    Scalar r;
    r.m_ = M;
    if (m_ == 1) {
      r.c_.assign(static_cast<std::size_t>(detail::euler_phi(M)), Rational(0));
      r.c_[0] = c_[0];
      return r;
    }
    const std::size_t step = static_cast<std::size_t>(M / m_);
    detail::QPoly p((c_.size() - 1) * step + 1, Rational(0));
    for (std::size_t k = 0; k < c_.size(); ++k) p[k * step] = c_[k];
    detail::qtrim(p);
    r.c_ = detail::qmod(p, detail::cyclotomic_poly(M));
    r.c_.resize(static_cast<std::size_t>(detail::euler_phi(M)), Rational(0));
    return r;
  }

  void normalize() {
    if (m_ == 1) return;
    for (std::size_t i = 1; i < c_.size(); ++i)
      if (c_[i] != 0) return;
    Rational v = c_[0];
    m_ = 1;
    c_.assign(1, v);
  }

  int m_ = 1;
  std::vector<Rational> c_;
};

}  // namespace eqlevi
