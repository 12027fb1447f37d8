#include <gtest/gtest.h>

#include "eqlevi/levi/levi.hpp"
#include "eqlevi/quotients/quotients.hpp"
#include "support.hpp"

using namespace eqlevi;
using eqlevi::testing::laurent_matrix;

namespace {

SplitBundle diagonal_split(const std::vector<int>& a) { return birkhoff_split(BundleDesc(diag_monomials(a))); }

GammaStructure additive_unipotent() {
  GammaStructure g;
  g.kind = GammaKind::Add;
  g.lift = Laurent2Matrix::identity(2);
  g.lift(0, 1) = Laurent2::var(0);
  return g;
}

GammaStructure mult_diagonal(std::size_t n, const std::vector<int>& w, int q = 0) {
  GammaStructure g;
  g.kind = GammaKind::Mult;
  g.q = q;
  g.lift = Laurent2Matrix::identity(n);
  for (std::size_t i = 0; i < n; ++i) g.lift(i, i) = Laurent2::var(0, w[i]);
  return g;
}

}  // namespace

TEST(LeviQuotient, Examples) {
  const auto q00 = levi_quotient(end_algebra(diagonal_split({0, 0})));
  EXPECT_EQ(q00.radical_basis.size(), 0u);
  EXPECT_EQ(q00.group(), "GL(2)");
  const auto q10 = levi_quotient(end_algebra(diagonal_split({1, 0})));
  EXPECT_EQ(q10.radical_basis.size(), 2u);
  EXPECT_EQ(q10.group(), "GL(1) x GL(1)");
  const auto q211 = levi_quotient(end_algebra(diagonal_split({2, 1, 1})));
  EXPECT_EQ(q211.radical_basis.size(), 4u);
  EXPECT_EQ(q211.group(), "GL(1) x GL(2)");
  EXPECT_EQ(q211.degrees, (std::vector<int>{2, 1}));
}

TEST(LeviQuotient, RadicalMatchesTraceFormRadical) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = eqlevi::testing::random_type(rng, static_cast<std::size_t>(eqlevi::testing::uniform(rng, 1, 4)), 2);
    const EndAlgebra alg = end_algebra(diagonal_split(a));
    std::vector<GlobalEndo> all;
    for (std::size_t k = 0; k < alg.dim(); ++k) all.push_back(alg.basis_element(k));
    const auto l = levi_quotient(alg);
    const auto r = radical(alg, all);
    EXPECT_EQ(l.radical_basis.size(), r.basis.size());
    for (const auto& x : l.radical_basis) EXPECT_TRUE(alg.express(r.basis, x));
    for (const auto& x : l.radical_basis) {
      GlobalEndo p = x;
      for (std::size_t k = 1; k < alg.rank(); ++k) p = p * x;
      EXPECT_TRUE(p.is_zero());
    }
  }
}

TEST(LeviQuotient, PsiIsMultiplicativeOnUnits) {
  std::mt19937 rng(5);
  std::mt19937_64 r64(5);
  int pairs = 0;
  while (pairs < 50) {
    const auto a = eqlevi::testing::random_type(rng, 3, 2);
    const SplitBundle s = birkhoff_split(eqlevi::testing::random_bundle(rng, a, 1));
    const EndAlgebra alg = end_algebra(s);
    const auto l = levi_quotient(alg);
    std::vector<GlobalEndo> basis;
    for (std::size_t k = 0; k < alg.dim(); ++k) basis.push_back(alg.basis_element(k));
    const GlobalEndo u = random_combination(alg, basis, r64, 3), v = random_combination(alg, basis, r64, 3);
    if (char_poly(s.type, u).charpoly.coeff(0).is_zero() || char_poly(s.type, v).charpoly.coeff(0).is_zero()) continue;
    EXPECT_EQ(l.psi(u * v), l.psi(u) * l.psi(v));
    ++pairs;
  }
}

TEST(Classify, FiniteGroupHypothesisNotMet) {
  const SplitBundle s = diagonal_split({0, 0});
  const GammaStructure g = generate_finite_group({{"s", Mobius::identity(), laurent_matrix({{0, 1}, {1, 0}})}}, 2);
  const auto c = classify_action_on_levi_quotient(levi_quotient(end_algebra(s)), GammaAction(s, g));
  EXPECT_EQ(c.verdict, Verdict::HypothesisNotMet);
}

TEST(Classify, MultiplicativeDiagonalIsTorusFactoring) {
  const SplitBundle s = diagonal_split({1, 0});
  const auto c = classify_action_on_levi_quotient(levi_quotient(end_algebra(s)), GammaAction(s, mult_diagonal(2, {2, -1}, 1)));
  EXPECT_EQ(c.verdict, Verdict::TorusFactoring);
  // Quotient GL(1) x GL(1) is abelian: conjugation acts with weight 0 twice.
  EXPECT_EQ(c.weights, (std::vector<std::pair<long, std::size_t>>{{0, 2}}));

  const SplitBundle t = diagonal_split({0, 0});
  const auto w = classify_action_on_levi_quotient(levi_quotient(end_algebra(t)), GammaAction(t, mult_diagonal(2, {2, -1})));
  EXPECT_EQ(w.verdict, Verdict::TorusFactoring);
  // ad of diag(2,-1) on gl(2): weights 0, 0, 3, -3.
  EXPECT_EQ(w.weights, (std::vector<std::pair<long, std::size_t>>{{-3, 1}, {0, 2}, {3, 1}}));
}

TEST(Classify, AdditiveUnipotentIsNontrivialNonTorus) {
  const SplitBundle s = diagonal_split({0, 0});
  const GammaAction act(s, additive_unipotent());
  const auto c = classify_action_on_levi_quotient(levi_quotient(end_algebra(s)), act);
  EXPECT_EQ(c.verdict, Verdict::NontrivialNonTorus);
  ASSERT_TRUE(c.witness.has_value());
  EXPECT_NE(act.act_param(Scalar(1), *c.witness), *c.witness);
  EXPECT_TRUE(c.corollary_applies);
  // Cross-check with the reduction: the equivariant run cannot reach the
  // line splitting of the trivial run.
  const LeviEngine le(act);
  EXPECT_EQ(le.maximal_torus_decomposition(0).partition(), (std::vector<std::size_t>{2}));
  const LeviEngine triv(GammaAction(s, GammaStructure::trivial(2)));
  EXPECT_EQ(triv.maximal_torus_decomposition(0).partition(), (std::vector<std::size_t>{1, 1}));
}

TEST(Classify, AdditiveShiftWithTrivialLiftIsTrivial) {
  const SplitBundle s = diagonal_split({1, 0});
  GammaStructure g;
  g.kind = GammaKind::Add;
  g.shift = Scalar(1);
  g.lift = Laurent2Matrix::identity(2);
  const auto c = classify_action_on_levi_quotient(levi_quotient(end_algebra(s)), GammaAction(s, g));
  EXPECT_EQ(c.verdict, Verdict::Trivial);
  EXPECT_FALSE(c.corollary_applies);
}

TEST(Partition, Refinement) {
  EXPECT_TRUE(partition_refines({1, 1, 1}, {2, 1}));
  EXPECT_TRUE(partition_refines({2, 1, 1}, {2, 2}));
  EXPECT_FALSE(partition_refines({2, 2}, {3, 1}));
  EXPECT_FALSE(partition_refines({2, 1}, {1, 1, 1}));
  EXPECT_TRUE(partition_refines({3, 2, 1}, {3, 3}));
}

TEST(Properties, TrivialRunRefinesEquivariantRun) {
  std::mt19937 rng(61);
  for (int trial = 0; trial < 6; ++trial) {
    const SplitBundle s = birkhoff_split(eqlevi::testing::random_bundle(rng, {1, 0, 0}, 1));
    const auto lift = [](const Poly& p) { return detail::poly_compose_l2(p, Laurent2::var(1)); };
    Laurent2Matrix j = Laurent2Matrix::identity(3);
    j(1, 1) = Laurent2::var(0, trial % 3);
    j(2, 2) = Laurent2::var(0, trial % 2);
    GammaStructure g;
    g.kind = GammaKind::Mult;
    g.lift = s.right_inv.transpose().map(lift) * j * s.right.transpose().map(lift);
    const GammaAction act(s, g);
    ASSERT_TRUE(act.report().ok());
    const auto h0 = LeviEngine(act).maximal_torus_decomposition(0).partition();
    const auto hat = LeviEngine(GammaAction(s, GammaStructure::trivial(3))).maximal_torus_decomposition(0).partition();
    EXPECT_TRUE(partition_refines(hat, h0));
    const auto c = classify_action_on_levi_quotient(levi_quotient(end_algebra(s)), act);
    EXPECT_EQ(c.verdict, Verdict::TorusFactoring);
    if (h0 == hat) {
      EXPECT_TRUE(c.verdict == Verdict::Trivial || c.verdict == Verdict::TorusFactoring);
    }
  }
}
