#pragma once

// Vector bundles on P^1 given by a transition matrix T(z) on C^* between the
// chart z (around 0) and the chart w = 1/z (around infinity).
//
// Convention: sections are column vectors v0(z) on chart 0 and vinf(w) on
// chart infinity with v0(z) = T(z)^t vinf(1/z).  Then diag(z^a) is O(a), and
// a split bundle has witnesses with L(1/z) T(z) R(z) = diag(z^a_i), L a
// polynomial matrix in w and R a polynomial matrix in z, both unimodular.
// Split coordinates: v0 = R(z)^{-t} v0',  vinf = L(w)^t vinf', so that
// v0' = diag(z^a) vinf'(1/z).

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "eqlevi/errors.hpp"
#include "eqlevi/exactmath/laurent.hpp"
#include "eqlevi/exactmath/matrix.hpp"
#include "eqlevi/exactmath/poly.hpp"

namespace eqlevi {

using PolyMatrix = Matrix<Poly>;

/// Global endomorphism in split coordinates: entry (i, j) is a polynomial in
/// z of degree <= a_i - a_j (zero when a_i < a_j).
using GlobalEndo = PolyMatrix;

class BundleDesc {
 public:
  BundleDesc() = default;
  explicit BundleDesc(LaurentMatrix transition) : t_(std::move(transition)) {
    if (t_.rows() != t_.cols()) throw InvalidInput("not a bundle datum: transition must be square");
    auto d = monomial_determinant(t_);
    if (!d) throw InvalidInput("not a bundle datum: determinant is not a nonzero monomial");
    det_ = *d;
  }

  std::size_t rank() const { return t_.rows(); }
  const LaurentMatrix& transition() const { return t_; }
  /// Degree of the bundle: exponent k of det T = c z^k.
  int degree() const { return det_.exponent; }
  const Scalar& det_coeff() const { return det_.coeff; }

  int min_exponent() const {
    int m = 0;
    bool first = true;
    for (std::size_t i = 0; i < rank(); ++i)
      for (std::size_t j = 0; j < rank(); ++j)
        if (!t_(i, j).is_zero()) {
          m = first ? t_(i, j).min_exp(0) : std::min(m, t_(i, j).min_exp(0));
          first = false;
        }
    return m;
  }
  int max_exponent() const {
    int m = 0;
    bool first = true;
    for (std::size_t i = 0; i < rank(); ++i)
      for (std::size_t j = 0; j < rank(); ++j)
        if (!t_(i, j).is_zero()) {
          m = first ? t_(i, j).max_exp(0) : std::max(m, t_(i, j).max_exp(0));
          first = false;
        }
    return m;
  }

 private:
  LaurentMatrix t_;
  MonomialDet det_{Scalar(1), 0};
};

struct SplitType {
  std::vector<int> exponents;  // descending

  std::size_t rank() const { return exponents.size(); }
  int degree() const { return std::accumulate(exponents.begin(), exponents.end(), 0); }
  friend bool operator==(const SplitType& a, const SplitType& b) { return a.exponents == b.exponents; }
  friend bool operator!=(const SplitType& a, const SplitType& b) { return !(a == b); }
};

inline SplitType make_split_type(std::vector<int> a) {
  std::sort(a.begin(), a.end(), std::greater<>());
  return SplitType{std::move(a)};
}

inline LaurentMatrix diag_monomials(const std::vector<int>& a) {
  LaurentMatrix d(a.size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d(i, i) = Laurent1::var(0, a[i]);
  return d;
}

struct SplitBundle {
  SplitType type;
  PolyMatrix left;       // L(w), unimodular
  PolyMatrix right;      // R(z), unimodular
  PolyMatrix left_inv;   // L(w)^{-1}
  PolyMatrix right_inv;  // R(z)^{-1}
  BundleDesc original;

  std::size_t rank() const { return type.rank(); }

  /// Exact re-check of L(1/z) T(z) R(z) = diag(z^a).
  bool verify_witness() const {
    const std::size_t n = rank();
    if (left.rows() != n || right.rows() != n) return false;
    const LaurentMatrix lhs = to_laurent_inverted(left) * original.transition() * to_laurent(right);
    if (lhs != diag_monomials(type.exponents)) return false;
    return left * left_inv == PolyMatrix::identity(n) && right * right_inv == PolyMatrix::identity(n);
  }
};

/// Global section as a pair of chart vectors.
struct Section {
  std::vector<Poly> chart0;    // polynomials in z
  std::vector<Poly> chart_inf; // polynomials in w
};

namespace detail {

inline PolyMatrix laurent_to_poly_matrix(const LaurentMatrix& m, int shift) {
  return m.map([shift](const Laurent1& l) { return to_poly(l, shift); });
}

// Inverse of a polynomial matrix whose determinant is a nonzero constant.
inline PolyMatrix unimodular_inverse(const PolyMatrix& m) {
  const std::size_t n = m.rows();
  if (n == 0) return m;
  Poly det = ring_determinant(m);
  if (det.degree() != 0) throw InvariantBreach("matrix expected to be unimodular is not");
  const Poly inv(det.coeff(0).inverse());
  PolyMatrix adj = ring_adjugate(m);
  return adj.map([&](const Poly& p) { return p * inv; });
}

inline int column_degree(const PolyMatrix& m, std::size_t j) {
  int d = -1;
  for (std::size_t i = 0; i < m.rows(); ++i) d = std::max(d, m(i, j).degree());
  return d;
}

}  // namespace detail

/// Basis of H^0(E(twist)); sections of E(twist) are those of the bundle with
/// transition z^twist T.
inline std::vector<Section> section_space(const BundleDesc& b, int twist) {
  const std::size_t n = b.rank();
  if (n == 0) return {};
  const int s = std::max(0, -b.min_exponent());
  const int k = b.degree() + static_cast<int>(n) * s;  // det of z^s T
  const int N = twist + k - s;
  if (N < 0) return {};
  // Unknowns: coefficient c of w^e in vinf_j, index j*(N+1)+e.
  // v0_i(z) = z^twist sum_j T_ji(z) vinf_j(1/z).
  const LaurentMatrix& T = b.transition();
  const std::size_t nu = n * static_cast<std::size_t>(N + 1);
  int lo = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!T(j, i).is_zero()) lo = std::min(lo, T(j, i).min_exp(0) + twist - N);
  // One equation per (component i, negative exponent e in [lo, -1]).
  const std::size_t neg = static_cast<std::size_t>(-lo);
  ScalarMatrix sys(n * neg, nu);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (const auto& [ex, c] : T(j, i).terms())
        for (int e = 0; e <= N; ++e) {
          const int zexp = ex[0] + twist - e;
          if (zexp < 0) sys(i * neg + static_cast<std::size_t>(zexp - lo), j * static_cast<std::size_t>(N + 1) + static_cast<std::size_t>(e)) += c;
        }
  std::vector<Section> out;
  for (const auto& v : linalg::nullspace(sys)) {
    Section sec;
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<Scalar> c(v.begin() + static_cast<long>(j * static_cast<std::size_t>(N + 1)),
                            v.begin() + static_cast<long>((j + 1) * static_cast<std::size_t>(N + 1)));
      sec.chart_inf.emplace_back(std::move(c));
    }
    for (std::size_t i = 0; i < n; ++i) {
      Laurent1 acc;
      for (std::size_t j = 0; j < n; ++j) acc += T(j, i) * to_laurent_inverted(sec.chart_inf[j]);
      acc *= Laurent1::var(0, twist);
      sec.chart0.push_back(to_poly(acc));
    }
    out.push_back(std::move(sec));
  }
  return out;
}

inline int section_count(const BundleDesc& b, int twist) { return static_cast<int>(section_space(b, twist).size()); }

/// Splitting type recovered from the section-count function alone.
inline SplitType split_type_via_sections(const BundleDesc& b) {
  const std::size_t n = b.rank();
  if (n == 0) return {};
  const int lo = b.min_exponent(), hi = b.max_exponent();
  std::vector<int> h;  // h[c - lo] = h0(E(-c)) for c in [lo, hi + 1]
  for (int c = lo; c <= hi + 1; ++c) h.push_back(section_count(b, -c));
  // #{a_i >= c} = h0(E(-c)) - h0(E(-c-1)).
  std::vector<int> a;
  int prev = 0;
  for (int c = hi; c >= lo; --c) {
    const int cnt = h[static_cast<std::size_t>(c - lo)] - h[static_cast<std::size_t>(c + 1 - lo)];
    for (int r = prev; r < cnt; ++r) a.push_back(c);
    prev = std::max(prev, cnt);
  }
  if (a.size() != n) throw InvariantBreach("section counts inconsistent with the rank");
  return SplitType{a};
}

/// Birkhoff factorization by column reduction of the polynomial matrix z^s T.
inline SplitBundle birkhoff_split(const BundleDesc& b) {
  const std::size_t n = b.rank();
  SplitBundle out;
  out.original = b;
  if (n == 0) return out;
  const int s = std::max(0, -b.min_exponent());
  PolyMatrix A = detail::laurent_to_poly_matrix(b.transition(), s);
  PolyMatrix R = PolyMatrix::identity(n), Rinv = PolyMatrix::identity(n);

  std::vector<int> d(n);
  for (;;) {
    ScalarMatrix lc(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      d[j] = detail::column_degree(A, j);
      if (d[j] < 0) throw InvalidInput("not a bundle datum: zero column");
      for (std::size_t i = 0; i < n; ++i) lc(i, j) = A(i, j).coeff(d[j]);
    }
    auto ker = linalg::nullspace(lc);
    if (ker.empty()) break;
    const ScalarVector& u = ker.front();
    std::size_t j = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!u[i].is_zero() && (j == n || d[i] > d[j])) j = i;
    // col_j += sum_i (u_i/u_j) z^{d_j-d_i} col_i: leading terms cancel.
    PolyMatrix N(n, n);
    for (std::size_t i = 0; i < n; ++i)
      if (i != j && !u[i].is_zero()) N(i, j) = Poly::monomial(u[i] / u[j], d[j] - d[i]);
    A = A * (PolyMatrix::identity(n) + N);
    R = R * (PolyMatrix::identity(n) + N);
    Rinv = (PolyMatrix::identity(n) - N) * Rinv;
  }
  // M(w) = A(z) diag(z^{-d}) is a polynomial matrix in w with M(0) = lc.
  PolyMatrix M(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<Scalar> c(static_cast<std::size_t>(d[j]) + 1);
      for (int e = 0; e <= d[j]; ++e) c[static_cast<std::size_t>(d[j] - e)] = A(i, j).coeff(e);
      M(i, j) = Poly(std::move(c));
    }
  PolyMatrix L = detail::unimodular_inverse(M);

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t x, std::size_t y) { return d[x] > d[y]; });
  out.type.exponents.resize(n);
  out.left = PolyMatrix(n, n);
  out.right = PolyMatrix(n, n);
  out.left_inv = PolyMatrix(n, n);
  out.right_inv = PolyMatrix(n, n);
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t q = perm[p];
    out.type.exponents[p] = d[q] - s;
    for (std::size_t i = 0; i < n; ++i) {
      out.right(i, p) = R(i, q);
      out.left(p, i) = L(q, i);
      out.right_inv(p, i) = Rinv(q, i);
      out.left_inv(i, p) = M(i, q);
    }
  }
  if (!out.verify_witness()) throw InvariantBreach("Birkhoff witness identity failed");
  return out;
}

/// Bundle of endomorphisms: End E = E (x) E^*, transition T (x) T^{-t}.
inline BundleDesc end_bundle(const BundleDesc& b) {
  const std::size_t n = b.rank();
  const LaurentMatrix& T = b.transition();
  LaurentMatrix adj = ring_adjugate(T);
  const Laurent1 inv_det = Laurent1::monomial(b.det_coeff().inverse(), {-b.degree()});
  LaurentMatrix tinv_t = adj.transpose().map([&](const Laurent1& x) { return x * inv_det; });
  LaurentMatrix e(n * n, n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) e(i * n + k, j * n + l) = T(i, j) * tinv_t(k, l);
  return BundleDesc(std::move(e));
}

}  // namespace eqlevi
