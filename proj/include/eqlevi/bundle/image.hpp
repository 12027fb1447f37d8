#pragma once

// Image bundles of idempotent global endomorphisms.

#include "eqlevi/bundle/bundle.hpp"

namespace eqlevi {

struct ColumnEchelon {
  PolyMatrix reduced;  // A U, nonzero columns first
  PolyMatrix U, Uinv;
  std::size_t rank = 0;
};

/// Column echelon form over K[z] by unimodular column operations.
inline ColumnEchelon column_echelon(const PolyMatrix& a) {
  ColumnEchelon e{a, PolyMatrix::identity(a.cols()), PolyMatrix::identity(a.cols()), 0};
  PolyMatrix& A = e.reduced;
  const std::size_t nc = A.cols();
  const auto swap_cols = [&](std::size_t x, std::size_t y) {
    if (x == y) return;
    for (std::size_t i = 0; i < A.rows(); ++i) std::swap(A(i, x), A(i, y));
    for (std::size_t i = 0; i < nc; ++i) std::swap(e.U(i, x), e.U(i, y));
    for (std::size_t j = 0; j < nc; ++j) std::swap(e.Uinv(x, j), e.Uinv(y, j));
  };
  std::size_t pc = 0;
  for (std::size_t i = 0; i < A.rows() && pc < nc; ++i) {
    for (;;) {
      std::size_t best = nc;
      for (std::size_t c = pc; c < nc; ++c)
        if (!A(i, c).is_zero() && (best == nc || A(i, c).degree() < A(i, best).degree())) best = c;
      if (best == nc) break;
      swap_cols(best, pc);
      bool done = true;
      for (std::size_t c = pc + 1; c < nc; ++c) {
        if (A(i, c).is_zero()) continue;
        const Poly q = A(i, c) / A(i, pc);
        for (std::size_t r = 0; r < A.rows(); ++r) A(r, c) -= q * A(r, pc);
        for (std::size_t r = 0; r < nc; ++r) e.U(r, c) -= q * e.U(r, pc);
        for (std::size_t j = 0; j < nc; ++j) e.Uinv(pc, j) += q * e.Uinv(c, j);
        if (!A(i, c).is_zero()) done = false;
      }
      if (done) {
        ++pc;
        break;
      }
    }
  }
  e.rank = pc;
  return e;
}

inline bool degree_bounds_hold(const SplitType& t, const GlobalEndo& s) {
  const std::size_t n = t.rank();
  if (s.rows() != n || s.cols() != n) return false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!s(i, j).is_zero() && s(i, j).degree() > t.exponents[i] - t.exponents[j]) return false;
  return true;
}

/// The endomorphism on the chart at infinity, as a polynomial matrix in w:
/// entry w^{a_i - a_j} s_ij(1/w).
inline PolyMatrix endo_at_infinity(const SplitType& t, const GlobalEndo& s) {
  const std::size_t n = t.rank();
  PolyMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (s(i, j).is_zero()) continue;
      const int top = t.exponents[i] - t.exponents[j];
      std::vector<Scalar> c(static_cast<std::size_t>(top) + 1);
      for (int e = 0; e <= s(i, j).degree(); ++e) c[static_cast<std::size_t>(top - e)] = s(i, j).coeff(e);
      out(i, j) = Poly(std::move(c));
    }
  return out;
}

/// The image bundle of an idempotent pi, with its own splitting.  Its
/// transition is G^t with G = X0(z) diag(z^a) Pinf(1/z), where P* are bases
/// of the image modules on both charts and X0 a left inverse of P0.
inline SplitBundle subbundle_from_idempotent(const SplitBundle& s, const GlobalEndo& pi) {
  if (!degree_bounds_hold(s.type, pi)) throw InvalidInput("endomorphism violates degree bounds");
  if (pi * pi != pi) throw InvalidInput("not an idempotent");
  const std::size_t n = s.rank();
  const ColumnEchelon e0 = column_echelon(pi);
  const std::size_t r = e0.rank;
  if (r == 0) return birkhoff_split(BundleDesc(LaurentMatrix(0, 0)));
  const ColumnEchelon ei = column_echelon(endo_at_infinity(s.type, pi));
  if (ei.rank != r) throw InvariantBreach("idempotent rank differs between charts");
  const PolyMatrix X0 = e0.Uinv.block(0, 0, r, n);
  const PolyMatrix Pinf = ei.reduced.block(0, 0, n, r);
  const LaurentMatrix G = to_laurent(X0) * diag_monomials(s.type.exponents) * to_laurent_inverted(Pinf);
  return birkhoff_split(BundleDesc(G.transpose()));
}

}  // namespace eqlevi
