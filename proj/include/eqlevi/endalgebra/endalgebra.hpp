#pragma once

// H^0(End E) as a finite-dimensional algebra in split coordinates.

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "eqlevi/bundle/image.hpp"
#include "eqlevi/errors.hpp"
#include "eqlevi/exactmath/roots.hpp"

namespace eqlevi {

/// A point of P^1 in one of the two charts.
struct Point {
  bool at_infinity = false;
  Scalar coord;

  static Point chart0(const Scalar& z) { return {false, z}; }
  static Point infinity_chart(const Scalar& w = Scalar(0)) { return {true, w}; }
  std::string to_string() const { return (at_infinity ? "w=" : "z=") + coord.to_string(); }
};

inline Point base_point() { return Point::chart0(Scalar(3)); }

inline std::vector<Point> default_sample_points() {
  return {Point::chart0(Scalar(0)), Point::chart0(Scalar(1)), Point::chart0(Scalar(-1)), Point::chart0(Scalar(2)),
          Point::infinity_chart()};
}

/// Fiber value of a global endomorphism; at infinity the frame is the split
/// frame of the chart w.
inline ScalarMatrix evaluate_at(const SplitType& t, const GlobalEndo& s, const Point& x) {
  const PolyMatrix m = x.at_infinity ? endo_at_infinity(t, s) : s;
  return m.map([&](const Poly& p) { return p(x.coord); });
}

/// p(s) inside the algebra.
inline GlobalEndo eval_poly(const Poly& p, const GlobalEndo& s) {
  GlobalEndo r(s.rows(), s.cols());
  for (std::size_t k = p.coeffs().size(); k-- > 0;) {
    r = r * s;
    for (std::size_t i = 0; i < s.rows(); ++i) r(i, i) += Poly(p.coeffs()[k]);
  }
  return r;
}

class EndAlgebra {
 public:
  struct BasisIndex {
    std::size_t i, j;
    int e;  // z^e in entry (i, j)
  };

  EndAlgebra() = default;
  explicit EndAlgebra(SplitBundle s) : split_(std::move(s)) {
    const auto& a = split_.type.exponents;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < a.size(); ++j)
        for (int e = 0; e <= a[i] - a[j]; ++e) index_.push_back({i, j, e});
  }

  const SplitBundle& split() const { return split_; }
  const SplitType& type() const { return split_.type; }
  std::size_t rank() const { return split_.rank(); }
  std::size_t dim() const { return index_.size(); }
  const std::vector<BasisIndex>& basis_index() const { return index_; }

  GlobalEndo identity() const { return PolyMatrix::identity(rank()); }
  GlobalEndo zero() const { return PolyMatrix(rank(), rank()); }

  GlobalEndo basis_element(std::size_t k) const {
    GlobalEndo m = zero();
    m(index_[k].i, index_[k].j) = Poly::monomial(Scalar(1), index_[k].e);
    return m;
  }

  GlobalEndo element(const ScalarVector& c) const {
    if (c.size() != dim()) throw InvalidInput("coordinate vector has wrong length");
    const std::size_t n = rank();
    std::vector<std::vector<std::vector<Scalar>>> coeffs(n, std::vector<std::vector<Scalar>>(n));
    for (std::size_t k = 0; k < dim(); ++k) {
      auto& v = coeffs[index_[k].i][index_[k].j];
      if (v.size() <= static_cast<std::size_t>(index_[k].e)) v.resize(static_cast<std::size_t>(index_[k].e) + 1);
      v[static_cast<std::size_t>(index_[k].e)] = c[k];
    }
    GlobalEndo m = zero();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = Poly(std::move(coeffs[i][j]));
    return m;
  }

  bool contains(const GlobalEndo& s) const { return degree_bounds_hold(type(), s); }

  ScalarVector coordinates(const GlobalEndo& s) const {
    if (!contains(s)) throw InvalidInput("endomorphism violates degree bounds");
    ScalarVector c(dim());
    for (std::size_t k = 0; k < dim(); ++k) c[k] = s(index_[k].i, index_[k].j).coeff(index_[k].e);
    return c;
  }

  /// Coordinates of b_k * b_l.
  ScalarVector structure_constants(std::size_t k, std::size_t l) const {
    return coordinates(basis_element(k) * basis_element(l));
  }

  /// Coordinate matrix whose columns are the given elements.
  ScalarMatrix coordinate_matrix(const std::vector<GlobalEndo>& xs) const {
    ScalarMatrix m(dim(), xs.size());
    for (std::size_t c = 0; c < xs.size(); ++c) {
      const ScalarVector v = coordinates(xs[c]);
      for (std::size_t r = 0; r < dim(); ++r) m(r, c) = v[r];
    }
    return m;
  }

  /// A linearly independent subset spanning the same space, in echelon form.
  std::vector<GlobalEndo> span_basis(const std::vector<GlobalEndo>& xs) const {
    if (xs.empty()) return {};
    ScalarMatrix m = coordinate_matrix(xs).transpose();
    linalg::rref(m);
    std::vector<GlobalEndo> out;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      ScalarVector v(dim());
      bool nz = false;
      for (std::size_t c = 0; c < dim(); ++c) {
        v[c] = m(r, c);
        nz = nz || !v[c].is_zero();
      }
      if (nz) out.push_back(element(v));
    }
    return out;
  }

  /// Solves x = sum c_k basis_k for c; nullopt when x is outside the span.
  std::optional<ScalarVector> express(const std::vector<GlobalEndo>& basis, const GlobalEndo& x) const {
    return linalg::solve(coordinate_matrix(basis), coordinates(x));
  }

 private:
  SplitBundle split_;
  std::vector<BasisIndex> index_;
};

inline EndAlgebra end_algebra(const SplitBundle& s) { return EndAlgebra(s); }

inline std::size_t end_dimension(const SplitType& t) {
  std::size_t d = 0;
  for (int x : t.exponents)
    for (int y : t.exponents) d += static_cast<std::size_t>(std::max(0, x - y + 1));
  return d;
}

struct CharPolyCertificate {
  Poly charpoly;
  Point base;
  std::vector<Point> points;
  bool constant = true;
};

/// Characteristic polynomial at the base point, re-checked at the sample
/// points; disagreement is an internal invariant breach.
inline CharPolyCertificate char_poly(const SplitType& t, const GlobalEndo& s,
                                     const std::vector<Point>& points = default_sample_points()) {
  CharPolyCertificate c{linalg::charpoly(evaluate_at(t, s, base_point())), base_point(), points, true};
  for (const auto& x : points) {
    if (linalg::charpoly(evaluate_at(t, s, x)) != c.charpoly) {
      c.constant = false;
      throw InvariantBreach("characteristic polynomial differs at " + x.to_string());
    }
  }
  return c;
}

inline std::vector<std::string> poly_strings(const std::vector<Poly>& ps) {
  std::vector<std::string> out;
  for (const auto& p : ps) out.push_back(p.to_string());
  return out;
}

inline bool is_nilpotent(const GlobalEndo& s) {
  GlobalEndo p = s;
  for (std::size_t k = 1; k < s.rows(); ++k) p = p * s;
  return p.is_zero();
}

namespace detail {

// Semisimple part as a polynomial in t modulo the characteristic polynomial
// p, by Newton iteration on the squarefree part q of p.
inline Poly semisimple_polynomial(const Poly& p) {
  const Poly q = p / Poly::gcd(p, p.derivative());
  const Poly dq = q.derivative();
  Poly x = Poly::x() % p;
  for (int iter = 0; iter < 64; ++iter) {
    const Poly qx = q.compose(x) % p;
    if (qx.is_zero()) return x;
    auto [g, u, v] = Poly::gcdext(dq.compose(x) % p, p);
    if (g.degree() != 0) throw InvariantBreach("derivative of squarefree part not invertible");
    x = (x - qx * u) % p;
  }
  throw InvariantBreach("Newton iteration for the semisimple part did not converge");
}

}  // namespace detail

/// Jordan-Chevalley decomposition inside the algebra: sigma_s is a polynomial
/// in sigma, sigma_n = sigma - sigma_s nilpotent.
inline std::pair<GlobalEndo, GlobalEndo> jordan_chevalley(const SplitType& t, const GlobalEndo& s,
                                                          const RootSearchBudget& budget = {}) {
  if (!degree_bounds_hold(t, s)) throw InvalidInput("endomorphism violates degree bounds");
  const Poly p = char_poly(t, s).charpoly;
  const RootSplit rs = poly_split_roots(p, budget);
  if (!rs.unsplit.empty()) throw EnlargeConductor(poly_strings(rs.unsplit));
  const GlobalEndo ss = eval_poly(detail::semisimple_polynomial(p), s);
  GlobalEndo sn = s - ss;
  if (!is_nilpotent(sn) || ss * sn != sn * ss) throw InvariantBreach("Jordan-Chevalley decomposition failed");
  return {ss, sn};
}

struct SpectralDecomposition {
  std::vector<Scalar> eigenvalues;
  std::vector<GlobalEndo> idempotents;
};

inline bool is_complete_orthogonal(const std::vector<GlobalEndo>& es, std::size_t n) {
  GlobalEndo sum(n, n);
  for (std::size_t i = 0; i < es.size(); ++i) {
    sum += es[i];
    for (std::size_t j = 0; j < es.size(); ++j) {
      const GlobalEndo pr = es[i] * es[j];
      if (i == j ? pr != es[i] : !pr.is_zero()) return false;
    }
  }
  return sum == PolyMatrix::identity(n);
}

/// Lagrange idempotents of a semisimple endomorphism with split spectrum.
inline SpectralDecomposition spectral_idempotents(const SplitType& t, const GlobalEndo& ss,
                                                  const RootSearchBudget& budget = {}) {
  const std::size_t n = t.rank();
  SpectralDecomposition out;
  if (n == 0) return out;
  const Poly p = char_poly(t, ss).charpoly;
  const RootSplit rs = poly_split_roots(p, budget);
  if (!rs.unsplit.empty()) throw EnlargeConductor(poly_strings(rs.unsplit));
  for (const auto& [r, m] : rs.roots) out.eigenvalues.push_back(r);
  Poly minimal(1);
  for (const auto& r : out.eigenvalues) minimal *= Poly::x() - Poly(r);
  if (!eval_poly(minimal, ss).is_zero()) throw InvalidInput("endomorphism is not semisimple");
  for (std::size_t i = 0; i < out.eigenvalues.size(); ++i) {
    Poly l(1);
    for (std::size_t j = 0; j < out.eigenvalues.size(); ++j)
      if (j != i) l *= (Poly::x() - Poly(out.eigenvalues[j])) * Poly((out.eigenvalues[i] - out.eigenvalues[j]).inverse());
    out.idempotents.push_back(eval_poly(l, ss));
  }
  if (!is_complete_orthogonal(out.idempotents, n)) throw InvariantBreach("spectral idempotents not orthogonal");
  return out;
}

/// Idempotent polynomials h_k with h_k = 1 mod F_k and 0 mod F_l (l != k)
/// for a pairwise coprime factorization p = prod F_k.
inline std::vector<Poly> crt_idempotent_polys(const std::vector<Poly>& fs) {
  Poly p(1);
  for (const auto& f : fs) p *= f;
  std::vector<Poly> out;
  for (const auto& f : fs) {
    const Poly cof = p / f;
    auto [g, u, v] = Poly::gcdext(cof % f, f);
    if (g.degree() != 0) throw InvariantBreach("factors are not coprime");
    out.push_back((cof * u) % p);
  }
  return out;
}

struct RadicalResult {
  std::vector<GlobalEndo> basis;  // radical basis
  std::size_t algebra_dim = 0;
  std::size_t quotient_dim() const { return algebra_dim - basis.size(); }
};

/// Radical of a subalgebra (given by a basis) as the kernel of the trace
/// form tr(x(x0) y(x0)).  Elements in that kernel have nilpotent value at
/// x0, hence everywhere by constancy of characteristic polynomials, so the
/// kernel is a nil ideal.
inline RadicalResult radical(const EndAlgebra& a, const std::vector<GlobalEndo>& sub) {
  RadicalResult out;
  out.algebra_dim = sub.size();
  std::vector<ScalarMatrix> vals;
  for (const auto& b : sub) vals.push_back(evaluate_at(a.type(), b, base_point()));
  ScalarMatrix g(sub.size(), sub.size());
  for (std::size_t i = 0; i < sub.size(); ++i)
    for (std::size_t j = i; j < sub.size(); ++j) g(i, j) = g(j, i) = (vals[i] * vals[j]).trace();
  for (const auto& v : linalg::nullspace(g)) {
    GlobalEndo x = a.zero();
    for (std::size_t k = 0; k < sub.size(); ++k)
      if (!v[k].is_zero()) x += Poly(v[k]) * sub[k];
    out.basis.push_back(std::move(x));
  }
  return out;
}

/// Portable random integer in [-bound, bound].
inline int random_coefficient(std::mt19937_64& rng, int bound) {
  return static_cast<int>(rng() % static_cast<std::uint64_t>(2 * bound + 1)) - bound;
}

inline GlobalEndo random_combination(const EndAlgebra& a, const std::vector<GlobalEndo>& basis, std::mt19937_64& rng,
                                     int bound) {
  GlobalEndo x = a.zero();
  for (const auto& b : basis) {
    const int c = random_coefficient(rng, bound);
    if (c != 0) x += Poly(c) * b;
  }
  return x;
}

}  // namespace eqlevi
