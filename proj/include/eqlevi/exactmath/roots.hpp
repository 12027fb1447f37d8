#pragma once

// Roots of polynomials over cyclotomic fields by bounded candidate search.
//
// For a monic squarefree f over Q(zeta_m0) and a target conductor m (m0 | m),
// f is rescaled to an integral monic g, whose roots then lie in Z[zeta_m].
// Candidates are power-basis coordinate vectors of bounded height; they are
// filtered by the roots of g modulo a prime l = 1 (mod m) under zeta -> w,
// filtered again modulo a second prime, and finally checked exactly.  Roots
// that exist but fall outside the search box end up in the `unsplit` output.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "eqlevi/errors.hpp"
#include "eqlevi/exactmath/poly.hpp"
#include "eqlevi/exactmath/scalar.hpp"

namespace eqlevi {

struct RootSearchBudget {
  int height_bound = 64;         // max |coordinate| for non-rational candidates
  int conductor_max = 24;        // largest cyclotomic conductor tried
  long enumeration_cap = 2000000;  // max candidate vectors per (factor, conductor)
};

struct RootSplit {
  std::vector<std::pair<Scalar, int>> roots;
  std::vector<Poly> unsplit;
};

namespace detail {

using u64 = std::uint64_t;
using ModPoly = std::vector<u64>;

inline u64 mulmod(u64 a, u64 b, u64 p) { return static_cast<u64>((__uint128_t)a * b % p); }
inline u64 powmod(u64 a, u64 e, u64 p) {
  u64 r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

inline bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool comp = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        comp = false;
        break;
      }
    }
    if (comp) return false;
  }
  return true;
}

// Smallest prime l = 1 (mod m) with l > lower.
inline u64 prime_one_mod(u64 m, u64 lower) {
  u64 l = (lower / m + 1) * m + 1;
  while (!is_prime_u64(l)) l += m;
  return l;
}

// An element of multiplicative order exactly m in F_l (m | l-1).
inline u64 root_of_unity(u64 m, u64 l) {
  std::vector<u64> primes;
  u64 t = m;
  for (u64 p = 2; p * p <= t; ++p)
    if (t % p == 0) {
      primes.push_back(p);
      while (t % p == 0) t /= p;
    }
  if (t > 1) primes.push_back(t);
  for (u64 g = 2;; ++g) {
    u64 w = powmod(g, (l - 1) / m, l);
    bool ok = true;
    for (u64 p : primes)
      if (powmod(w, m / p, l) == 1) ok = false;
    if (ok) return w;
  }
}

inline void mp_trim(ModPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline ModPoly mp_mod(ModPoly a, const ModPoly& b, u64 p) {
  mp_trim(a);
  const u64 inv = powmod(b.back(), p - 2, p);
  while (a.size() >= b.size()) {
    const u64 f = mulmod(a.back(), inv, p);
    const std::size_t sh = a.size() - b.size();
    for (std::size_t j = 0; j < b.size(); ++j) a[sh + j] = (a[sh + j] + p - mulmod(f, b[j], p)) % p;
    mp_trim(a);
  }
  return a;
}

inline ModPoly mp_mulmod(const ModPoly& a, const ModPoly& b, const ModPoly& m, u64 p) {
  if (a.empty() || b.empty()) return {};
  ModPoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + mulmod(a[i], b[j], p)) % p;
  return mp_mod(r, m, p);
}

inline ModPoly mp_powmod(ModPoly base, u64 e, const ModPoly& m, u64 p) {
  ModPoly r{1};
  base = mp_mod(base, m, p);
  while (e) {
    if (e & 1) r = mp_mulmod(r, base, m, p);
    base = mp_mulmod(base, base, m, p);
    e >>= 1;
  }
  return r;
}

inline ModPoly mp_gcd(ModPoly a, ModPoly b, u64 p) {
  mp_trim(a);
  mp_trim(b);
  while (!b.empty()) {
    ModPoly r = mp_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    const u64 inv = powmod(a.back(), p - 2, p);
    for (auto& x : a) x = mulmod(x, inv, p);
  }
  return a;
}

inline ModPoly mp_div(ModPoly a, const ModPoly& b, u64 p) {
  mp_trim(a);
  ModPoly q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, 0);
  const u64 inv = powmod(b.back(), p - 2, p);
  while (a.size() >= b.size()) {
    const u64 f = mulmod(a.back(), inv, p);
    const std::size_t sh = a.size() - b.size();
    q[sh] = f;
    for (std::size_t j = 0; j < b.size(); ++j) a[sh + j] = (a[sh + j] + p - mulmod(f, b[j], p)) % p;
    mp_trim(a);
    if (a.size() < b.size()) break;
  }
  return q;
}

// Splits a monic product of distinct linear factors (Cantor-Zassenhaus).
inline void mp_split_linear(const ModPoly& h, u64 p, std::mt19937_64& rng, std::vector<u64>& out) {
  if (h.size() <= 1) return;
  if (h.size() == 2) {
    out.push_back((p - h[0]) % p);
    return;
  }
  if (p == 2) {
    for (u64 x = 0; x < 2; ++x) {
      u64 v = 0;
      for (std::size_t k = h.size(); k-- > 0;) v = (mulmod(v, x, p) + h[k]) % p;
      if (v == 0) out.push_back(x);
    }
    return;
  }
  for (;;) {
    const u64 a = rng() % p;
    ModPoly base{a, 1};
    ModPoly t = mp_powmod(base, (p - 1) / 2, h, p);
    if (t.empty()) t = {p - 1};
    else t[0] = (t[0] + p - 1) % p;
    mp_trim(t);
    ModPoly g = mp_gcd(h, t, p);
    if (g.size() > 1 && g.size() < h.size()) {
      mp_split_linear(g, p, rng, out);
      mp_split_linear(mp_div(h, g, p), p, rng, out);
      return;
    }
  }
}

// All roots in F_p of a polynomial (not necessarily squarefree).
inline std::vector<u64> roots_mod_p(ModPoly g, u64 p) {
  mp_trim(g);
  if (g.size() <= 1) return {};
  const u64 inv = powmod(g.back(), p - 2, p);
  for (auto& x : g) x = mulmod(x, inv, p);
  ModPoly xp = mp_powmod(ModPoly{0, 1}, p, g, p);
  if (xp.size() < 2) xp.resize(2, 0);
  xp[1] = (xp[1] + p - 1) % p;
  mp_trim(xp);
  ModPoly h = xp.empty() ? g : mp_gcd(g, xp, p);
  std::vector<u64> out;
  std::mt19937_64 rng(0x5eed);
  mp_split_linear(h, p, rng, out);
  std::sort(out.begin(), out.end());
  return out;
}

// Image of a rational under Z[1/den] -> F_p; false if the denominator vanishes.
inline bool rational_mod(const Rational& q, u64 p, u64& out) {
  const unsigned long pm = static_cast<unsigned long>(p);
  u64 den = mpz_fdiv_ui(q.get_den_mpz_t(), pm);
  if (den == 0) return false;
  u64 num = mpz_fdiv_ui(q.get_num_mpz_t(), pm);
  out = mulmod(num, powmod(den, p - 2, p), p);
  return true;
}

// Image of a Scalar under zeta_m -> w (w of order m in F_p); the scalar's
// conductor must divide m.
inline bool scalar_mod(const Scalar& s, int m, u64 w, u64 p, u64& out) {
  const int ms = s.conductor();
  const u64 wz = powmod(w, static_cast<u64>(m / ms), p);
  u64 acc = 0, pw = 1;
  for (const auto& c : s.coeffs()) {
    u64 v;
    if (!rational_mod(c, p, v)) return false;
    acc = (acc + mulmod(v, pw, p)) % p;
    pw = mulmod(pw, wz, p);
  }
  out = acc;
  return true;
}

inline mpz_class lcm_den(const Scalar& s) {
  mpz_class d = 1;
  for (const auto& c : s.coeffs()) d = lcm(d, mpz_class(c.get_den()));
  return d;
}

inline double abs_bound(const Scalar& s) {
  double b = 0;
  for (const auto& c : s.coeffs()) b += std::fabs(c.get_d());
  return b;
}

// Smallest D (up to large unfactored cofactors) with D^(d-k) f_k integral
// for all k, so that D t runs over algebraic integers.
inline mpz_class integral_scale(const Poly& f) {
  const int d = f.degree();
  std::map<unsigned long, unsigned long> need;
  mpz_class rest = 1;
  for (int k = 0; k < d; ++k) {
    mpz_class q = lcm_den(f.coeff(k));
    const unsigned long e = static_cast<unsigned long>(d - k);
    for (unsigned long p = 2; p < 100000 && q > 1; p += (p == 2 ? 1 : 2)) {
      unsigned long v = 0;
      while (mpz_divisible_ui_p(q.get_mpz_t(), p)) {
        q /= p;
        ++v;
      }
      if (v) need[p] = std::max(need[p], (v + e - 1) / e);
    }
    if (q > 1) rest = lcm(rest, q);
  }
  mpz_class D = rest;
  for (const auto& [p, v] : need) {
    mpz_class pk;
    mpz_ui_pow_ui(pk.get_mpz_t(), p, v);
    D *= pk;
  }
  return D;
}

// Roots in Q(zeta_m) of a monic squarefree polynomial over a subfield.
inline std::vector<Scalar> roots_in_conductor(const Poly& f, int m, const RootSearchBudget& budget) {
  const int d = f.degree();
  if (d < 1) return {};
  // Integral rescaling u = D t.
  const mpz_class D = integral_scale(f);
  std::vector<Scalar> g(static_cast<std::size_t>(d) + 1);
  {
    Scalar Dk(1), Ds{Rational(D)};
    for (int k = d; k >= 0; --k) {
      g[static_cast<std::size_t>(k)] = f.coeff(k) * Dk;
      Dk *= Ds;
    }
  }
  const Poly gp(g);
  double R = 0;
  for (int k = 0; k < d; ++k) R = std::max(R, abs_bound(gp.coeff(k)));
  R += 1;
  const int phi = euler_phi(m);
  double hc = phi == 1 ? std::ceil(R) : std::min<double>(std::ceil(2 * R) + 1, budget.height_bound);
  if (phi > 1) {
    const double cap = std::pow(static_cast<double>(budget.enumeration_cap), 1.0 / (phi - 1));
    hc = std::min(hc, std::floor((cap - 1) / 2));
    if (hc < 1) hc = 1;
  }
  hc = std::min(hc, 1e9);
  const long H = static_cast<long>(hc);
  if (phi > 1 && std::pow(2.0 * static_cast<double>(H) + 1, phi - 1) > static_cast<double>(budget.enumeration_cap))
    return {};

  const u64 l1 = prime_one_mod(static_cast<u64>(m), std::max<u64>(1000003ull, 2ull * static_cast<u64>(H) + 3));
  const u64 l2 = prime_one_mod(static_cast<u64>(m), l1);
  const u64 w1 = root_of_unity(static_cast<u64>(m), l1);
  const u64 w2 = root_of_unity(static_cast<u64>(m), l2);

  ModPoly g1(g.size()), g2(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!scalar_mod(g[k], m, w1, l1, g1[k]) || !scalar_mod(g[k], m, w2, l2, g2[k]))
      throw InvariantBreach("non-integral coefficient after rescaling");
  }
  // A root in Z[zeta_m] reduces to a root modulo every prime l = 1 mod m.
  {
    u64 l = l2;
    for (int k = 0; k < 8; ++k) {
      l = prime_one_mod(static_cast<u64>(m), l);
      const u64 w = root_of_unity(static_cast<u64>(m), l);
      ModPoly gl(g.size());
      for (std::size_t i = 0; i < g.size(); ++i)
        if (!scalar_mod(g[i], m, w, l, gl[i])) throw InvariantBreach("non-integral coefficient after rescaling");
      if (roots_mod_p(gl, l).empty()) return {};
    }
  }

  const auto eval2 = [&](const std::vector<long>& c) {
    u64 beta = 0, pw = 1;
    for (long x : c) {
      const u64 xv = static_cast<u64>(((x % static_cast<long>(l2)) + static_cast<long>(l2)) % static_cast<long>(l2));
      beta = (beta + mulmod(xv, pw, l2)) % l2;
      pw = mulmod(pw, w2, l2);
    }
    u64 v = 0;
    for (std::size_t k = g2.size(); k-- > 0;) v = (mulmod(v, beta, l2) + g2[k]) % l2;
    return v == 0;
  };

  std::vector<Scalar> found;
  const auto accept = [&](const std::vector<long>& c) {
    if (!eval2(c)) return;
    std::vector<Rational> coords;
    for (long x : c) coords.emplace_back(x);
    Scalar beta(m, coords);
    if (!gp(beta).is_zero()) return;
    Scalar alpha = beta / Scalar(Rational(D));
    for (const auto& r : found)
      if (r == alpha) return;
    found.push_back(alpha);
  };

  std::vector<u64> wp(static_cast<std::size_t>(phi));
  wp[0] = 1;
  for (int j = 1; j < phi; ++j) wp[static_cast<std::size_t>(j)] = mulmod(wp[static_cast<std::size_t>(j) - 1], w1, l1);
  const long half = static_cast<long>(l1 / 2);
  const auto lift = [&](u64 v) { return static_cast<long>(v) > half ? static_cast<long>(v) - static_cast<long>(l1) : static_cast<long>(v); };

  for (u64 r : roots_mod_p(g1, l1)) {
    if (phi == 1) {
      long c0 = lift(r);
      if (std::labs(c0) <= H) accept({c0});
      continue;
    }
    std::vector<long> c(static_cast<std::size_t>(phi), -H);
    c[0] = 0;
    const auto residue = [&](long x) {
      return static_cast<u64>(((x % static_cast<long>(l1)) + static_cast<long>(l1)) % static_cast<long>(l1));
    };
    // s = sum_{j>=1} c_j w^j mod l1, maintained along the odometer.
    u64 s = 0;
    for (int j = 1; j < phi; ++j) s = (s + mulmod(residue(-H), wp[static_cast<std::size_t>(j)], l1)) % l1;
    const u64 span = residue(2 * H);
    for (;;) {
      const long c0 = lift((r + l1 - s) % l1);
      if (std::labs(c0) <= H) {
        c[0] = c0;
        accept(c);
      }
      int j = 1;
      while (j < phi && c[static_cast<std::size_t>(j)] == H) {
        c[static_cast<std::size_t>(j)] = -H;
        s = (s + l1 - mulmod(span, wp[static_cast<std::size_t>(j)], l1)) % l1;
        ++j;
      }
      if (j == phi) break;
      ++c[static_cast<std::size_t>(j)];
      s = (s + wp[static_cast<std::size_t>(j)]) % l1;
    }
  }
  return found;
}

inline int coefficient_conductor(const Poly& p) {
  int m = 1;
  for (const auto& c : p.coeffs()) m = canonical_conductor(std::lcm(m, c.conductor()));
  return m;
}

enum class SqrtStatus { Found, OutOfRange, Unknown };

/// Square root of a rational number as a cyclotomic element, built from
/// Gauss sums; OutOfRange when Q(sqrt q) has conductor above the bound,
/// Unknown when the radicand could not be factored.
inline SqrtStatus sqrt_rational(const Rational& q, int conductor_max, Scalar& out) {
  if (q == 0) {
    out = Scalar(0);
    return SqrtStatus::Found;
  }
  mpz_class n = abs(q.get_num() * q.get_den());
  Scalar root(Rational(1, 1) / Rational(q.get_den()));
  int cond = 1;
  long sign = q < 0 ? -1 : 1;
  for (unsigned long p = 2; p < 1000000 && n > 1; p += (p == 2 ? 1 : 2)) {
    unsigned long v = 0;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      n /= p;
      ++v;
    }
    for (unsigned long k = 0; k < v / 2; ++k) root *= Scalar(static_cast<long>(p));
    if (v % 2 == 0) continue;
    if (p == 2) {
      root *= Scalar::zeta(8, 1) + Scalar::zeta(8, 7);
      cond = std::lcm(cond, 8);
      continue;
    }
    const int pi = static_cast<int>(p);
    if (pi > conductor_max) return SqrtStatus::OutOfRange;
    Scalar g(0);
    for (int k = 1; k < pi; ++k) {
      const bool residue = powmod(static_cast<u64>(k), (p - 1) / 2, p) == 1;
      g += residue ? Scalar::zeta(pi, k) : -Scalar::zeta(pi, k);
    }
    root *= g;  // g^2 = (-1)^((p-1)/2) p
    if (p % 4 == 3) sign = -sign;
    cond = std::lcm(cond, pi);
  }
  if (n > 1) return SqrtStatus::Unknown;
  if (sign < 0) {
    root *= Scalar::zeta(4, 1);
    cond = std::lcm(cond, 4);
  }
  if (canonical_conductor(cond) > conductor_max) return SqrtStatus::OutOfRange;
  if (root * root != Scalar(q)) throw InvariantBreach("square root construction failed");
  out = root;
  return SqrtStatus::Found;
}

/// Roots of one squarefree layer over cyclotomic fields up to the bound;
/// returns the roots and the unsplit remainder.
inline std::pair<std::vector<Scalar>, Poly> split_squarefree(const Poly& factor, const RootSearchBudget& budget) {
  std::vector<Scalar> roots;
  Poly rem = factor.monic();
  const auto take = [&](const Scalar& r) {
    roots.push_back(r);
    rem = rem / (Poly::x() - Poly(r));
  };
  std::vector<int> ms;
  for (int m = 1; m <= std::max(budget.conductor_max, coefficient_conductor(factor)); ++m)
    if (m % coefficient_conductor(factor) == 0 && m % 4 != 2) ms.push_back(m);
  std::stable_sort(ms.begin(), ms.end(), [](int a, int b) { return euler_phi(a) < euler_phi(b); });
  for (int m : ms) {
    if (rem.degree() == 1) take(-rem.coeff(0));
    if (rem.degree() < 1) break;
    if (rem.degree() == 2 && coefficient_conductor(rem) == 1) {
      const Scalar b = rem.coeff(1), c = rem.coeff(0);
      const Scalar disc = b * b - Scalar(4) * c;
      Scalar sq;
      const auto st = sqrt_rational(disc.is_zero() ? Rational(0) : disc.coeffs()[0], budget.conductor_max, sq);
      if (st == SqrtStatus::OutOfRange) break;
      if (st == SqrtStatus::Found) {
        const Scalar half = Scalar(Rational(1, 2));
        const Scalar r1 = (-b + sq) * half, r2 = (-b - sq) * half;
        take(r1);
        take(r2);
        break;
      }
    }
    // Roots in subfields were removed at smaller conductors.
    if (m % coefficient_conductor(rem) != 0) continue;
    for (const auto& r : roots_in_conductor(rem, m, budget)) take(r);
  }
  if (rem.degree() == 1) take(-rem.coeff(0));
  return {roots, rem};
}

}  // namespace detail

/// Conductors tried by the root search, in search order.
inline std::vector<int> candidate_conductors(int base, int conductor_max) {
  std::vector<int> ms;
  for (int m = 1; m <= std::max(conductor_max, base); ++m)
    if (m % base == 0 && m % 4 != 2) ms.push_back(m);
  std::stable_sort(ms.begin(), ms.end(),
                   [](int a, int b) { return detail::euler_phi(a) < detail::euler_phi(b); });
  return ms;
}

/// Splits a monic polynomial into linear factors over cyclotomic fields up to
/// the conductor bound; what cannot be split is returned in `unsplit`.
inline RootSplit poly_split_roots(const Poly& p, const RootSearchBudget& budget = {}) {
  if (p.is_zero()) throw InvalidInput("zero input");
  RootSplit out;
  for (const auto& [factor, mult] : poly_squarefree_split(p)) {
    auto [roots, rem] = detail::split_squarefree(factor, budget);
    for (const auto& r : roots) out.roots.emplace_back(r, mult);
    if (rem.degree() > 1)
      for (int k = 0; k < mult; ++k) out.unsplit.push_back(rem);
  }
  return out;
}

/// Pairwise coprime factorization p = prod f_i^{m_i} with the f_i monic
/// and squarefree: linear factors for every root found, plus the unsplit
/// remainder of each squarefree layer.
struct PrimaryFactor {
  Poly factor;
  int multiplicity = 1;
  bool linear() const { return factor.degree() == 1; }
};

inline std::vector<PrimaryFactor> primary_factors(const Poly& p, const RootSearchBudget& budget = {}) {
  std::vector<PrimaryFactor> out;
  for (const auto& [factor, mult] : poly_squarefree_split(p)) {
    auto [roots, rem] = detail::split_squarefree(factor, budget);
    for (const auto& r : roots) out.push_back({Poly::x() - Poly(r), mult});
    if (rem.degree() >= 1) out.push_back({rem, mult});
  }
  return out;
}

}  // namespace eqlevi
