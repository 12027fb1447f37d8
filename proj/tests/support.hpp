#pragma once

// Random instance generators shared by the unit and acceptance suites.

#include <random>
#include <vector>

#include "eqlevi/bundle/bundle.hpp"

namespace eqlevi::testing {

inline int uniform(std::mt19937& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Poly random_poly(std::mt19937& rng, int max_deg, int bound = 3) {
  std::vector<Scalar> c(static_cast<std::size_t>(uniform(rng, 0, max_deg)) + 1);
  for (auto& x : c) x = Scalar(uniform(rng, -bound, bound));
  return Poly(std::move(c));
}

/// Unimodular polynomial matrix with entries of degree <= max_deg:
/// permutation * upper unipotent * constant lower unipotent.
inline PolyMatrix random_unimodular(std::mt19937& rng, std::size_t n, int max_deg) {
  PolyMatrix u = PolyMatrix::identity(n), c = PolyMatrix::identity(n), p(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      u(i, j) = random_poly(rng, max_deg);
      c(j, i) = Poly(uniform(rng, -2, 2));
    }
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  for (std::size_t i = 0; i < n; ++i) p(i, perm[i]) = Poly(uniform(rng, 0, 1) ? 1 : -1);
  return p * u * c;
}

/// T = B(1/z) diag(z^a) A(z) with random unimodular witnesses.
inline BundleDesc random_bundle(std::mt19937& rng, const std::vector<int>& a, int max_deg) {
  const std::size_t n = a.size();
  const PolyMatrix A = random_unimodular(rng, n, max_deg), B = random_unimodular(rng, n, max_deg);
  return BundleDesc(to_laurent_inverted(B) * diag_monomials(a) * to_laurent(A));
}

inline std::vector<int> random_type(std::mt19937& rng, std::size_t n, int bound) {
  std::vector<int> a(n);
  for (auto& x : a) x = uniform(rng, -bound, bound);
  return a;
}

inline LaurentMatrix laurent_matrix(std::initializer_list<std::initializer_list<Laurent1>> rows) {
  LaurentMatrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (const auto& x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

inline Laurent1 z(int e = 1) { return Laurent1::var(0, e); }

}  // namespace eqlevi::testing
