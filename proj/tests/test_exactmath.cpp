#include <gtest/gtest.h>

#include <random>

#include "eqlevi/exactmath/laurent.hpp"
#include "eqlevi/exactmath/roots.hpp"

using namespace eqlevi;

namespace {

Scalar random_scalar(std::mt19937& rng, int m) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 5);
  std::vector<Rational> c(static_cast<std::size_t>(detail::euler_phi(m)));
  for (auto& x : c) {
    x = Rational(num(rng), den(rng));
    x.canonicalize();
  }
  return Scalar(m, c);
}

Poly t() { return Poly::x(); }

Poly expand(const RootSplit& s) {
  Poly p(1);
  for (const auto& [r, k] : s.roots) p *= (t() - Poly(r)).pow(k);
  for (const auto& u : s.unsplit) p *= u;
  return p;
}

}  // namespace

TEST(Scalar, FieldAxiomsOnRandomElements) {
  std::mt19937 rng(7);
  for (int m : {1, 3, 4, 5, 8, 12}) {
    for (int trial = 0; trial < 20; ++trial) {
      Scalar a = random_scalar(rng, m), b = random_scalar(rng, m), c = random_scalar(rng, m);
      EXPECT_EQ((a * b) * c, a * (b * c));
      EXPECT_EQ((a + b) * c, a * c + b * c);
      EXPECT_EQ(a * b, b * a);
      if (!a.is_zero()) {
        EXPECT_TRUE((a * a.inverse()).is_one());
      }
    }
  }
}

TEST(Scalar, EmbeddingIsRingCompatible) {
  std::mt19937 rng(11);
  const std::vector<std::pair<int, int>> towers{{3, 12}, {4, 12}, {4, 8}, {5, 20}, {1, 7}};
  for (auto [m, M] : towers) {
    for (int trial = 0; trial < 20; ++trial) {
      Scalar a = random_scalar(rng, m), b = random_scalar(rng, m);
      EXPECT_EQ((a + b).embed(M), a.embed(M) + b.embed(M));
      EXPECT_EQ((a * b).embed(M), a.embed(M) * b.embed(M));
      EXPECT_EQ(a.embed(M), a);
    }
  }
}

TEST(Scalar, RootsOfUnity) {
  EXPECT_TRUE(Scalar::zeta(4).pow(4).is_one());
  EXPECT_EQ(Scalar::zeta(4).pow(2), Scalar(-1));
  EXPECT_TRUE(Scalar::zeta(6).pow(6).is_one());
  EXPECT_EQ(Scalar::zeta(12).pow(4), Scalar::zeta(3));
  // 1 + zeta_3 + zeta_3^2 = 0
  EXPECT_TRUE((Scalar(1) + Scalar::zeta(3) + Scalar::zeta(3).pow(2)).is_zero());
}

TEST(Scalar, SerializationRoundTrip) {
  std::mt19937 rng(3);
  for (int m : {1, 3, 8}) {
    Scalar a = random_scalar(rng, m);
    EXPECT_EQ(Scalar::parse(a.to_string()), a);
  }
  EXPECT_EQ(Scalar::parse("-3/4"), Scalar(Rational(-3, 4)));
  EXPECT_EQ(Scalar::parse("[4; 0, 1]"), Scalar::zeta(4));
  EXPECT_THROW(Scalar::parse("[4; 1]"), InvalidInput);
}

TEST(Poly, DegreeIsAdditiveAndGcdMonic) {
  Poly a = Poly(std::vector<Scalar>{1, 2, 3});
  Poly b = Poly(std::vector<Scalar>{Scalar::zeta(3), 0, 0, 5});
  EXPECT_EQ((a * b).degree(), a.degree() + b.degree());
  Poly g = Poly::gcd(a * (t() - Poly(2)), b * (t() - Poly(2)) * Poly(7));
  EXPECT_TRUE(g.leading().is_one());
  EXPECT_EQ(g, t() - Poly(2));
  auto [h, s, u] = Poly::gcdext(a, b);
  EXPECT_EQ(s * a + u * b, h);
}

TEST(SquarefreeSplit, PerfectSquare) {
  auto s = poly_squarefree_split(t() * t() - Poly(2) * t() + Poly(1));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].first, t() - Poly(1));
  EXPECT_EQ(s[0].second, 2);
}

TEST(SquarefreeSplit, AlreadySquarefree) {
  auto s = poly_squarefree_split(t() * t() - Poly(1));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].first, t() * t() - Poly(1));
  EXPECT_EQ(s[0].second, 1);
}

TEST(SquarefreeSplit, MixedMultiplicities) {
  const Poly p = t().pow(3) - t().pow(2);
  auto s = poly_squarefree_split(p);
  ASSERT_EQ(s.size(), 2u);
  // Oracle: expand the claimed factorization and compare, check coprimality.
  Poly prod(1);
  for (const auto& [f, k] : s) prod *= f.pow(k);
  EXPECT_EQ(prod, p);
  EXPECT_EQ(Poly::gcd(s[0].first, s[1].first), Poly(1));
  EXPECT_EQ(s[0], (std::pair<Poly, int>{t() - Poly(1), 1}));
  EXPECT_EQ(s[1], (std::pair<Poly, int>{t(), 2}));
}

TEST(SquarefreeSplit, ZeroInput) {
  try {
    poly_squarefree_split(Poly());
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_STREQ(e.what(), "zero input");
  }
}

TEST(SplitRoots, RationalPair) {
  auto s = poly_split_roots(t() * t() - Poly(1));
  EXPECT_TRUE(s.unsplit.empty());
  ASSERT_EQ(s.roots.size(), 2u);
  EXPECT_EQ(expand(s), t() * t() - Poly(1));
}

TEST(SplitRoots, FourthRootsOfUnity) {
  RootSearchBudget b;
  b.conductor_max = 4;
  auto s = poly_split_roots(t() * t() + Poly(1), b);
  EXPECT_TRUE(s.unsplit.empty());
  ASSERT_EQ(s.roots.size(), 2u);
  for (const auto& [r, k] : s.roots) {
    EXPECT_TRUE(r == Scalar::zeta(4) || r == -Scalar::zeta(4));
    EXPECT_EQ(k, 1);
  }
}

TEST(SplitRoots, SqrtTwoNotInGaussianField) {
  RootSearchBudget b;
  b.conductor_max = 4;
  const Poly p = t() * t() - Poly(2);
  auto s = poly_split_roots(p, b);
  EXPECT_TRUE(s.roots.empty());
  ASSERT_EQ(s.unsplit.size(), 1u);
  EXPECT_EQ(s.unsplit[0], p);
  // Independent check: no element x + y*i with small integer/half-integer
  // coordinates squares to 2.
  for (int x = -8; x <= 8; ++x)
    for (int y = -8; y <= 8; ++y) {
      Scalar c = Scalar(4, {Rational(x, 2), Rational(y, 2)});
      EXPECT_NE(c * c, Scalar(2));
    }
}

TEST(SplitRoots, SqrtTwoInConductorEight) {
  RootSearchBudget b;
  b.conductor_max = 8;
  auto s = poly_split_roots(t() * t() - Poly(2), b);
  EXPECT_TRUE(s.unsplit.empty());
  ASSERT_EQ(s.roots.size(), 2u);
  for (const auto& [r, k] : s.roots) EXPECT_EQ(r * r, Scalar(2));
}

TEST(SplitRoots, ReexpansionReproducesInput) {
  std::mt19937 rng(5);
  std::vector<Scalar> pool{Scalar(1), Scalar(-2), Scalar(Rational(1, 3)), Scalar::zeta(3),
                           Scalar::zeta(4) * Scalar(2), Scalar(3) - Scalar::zeta(8)};
  for (int trial = 0; trial < 15; ++trial) {
    Poly p(1);
    const int k = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < k; ++i) p *= t() - Poly(pool[rng() % pool.size()]);
    if (trial % 3 == 0) p *= t() * t() - Poly(3);  // irreducible below conductor 12
    RootSearchBudget b;
    b.conductor_max = 8;
    auto s = poly_split_roots(p, b);
    EXPECT_EQ(expand(s), p) << p.to_string();
    for (const auto& [r, m] : s.roots) EXPECT_TRUE(p(r).is_zero());
  }
}

TEST(SplitRoots, PrimaryFactorsAreCoprime) {
  const Poly p = (t() - Poly(1)).pow(2) * (t() * t() - Poly(2)) * (t() + Poly(3));
  RootSearchBudget b;
  b.conductor_max = 4;
  auto fs = primary_factors(p, b);
  Poly prod(1);
  for (const auto& f : fs) prod *= f.factor.pow(f.multiplicity);
  EXPECT_EQ(prod, p);
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (std::size_t j = i + 1; j < fs.size(); ++j) EXPECT_EQ(Poly::gcd(fs[i].factor, fs[j].factor), Poly(1));
}

TEST(SplitRoots, QuadraticsThroughGaussSums) {
  // sqrt(17) lives in Q(zeta_17), sqrt(-19) in Q(zeta_19); sqrt(19) needs 76.
  for (int d : {17, -19, -15, 12, -1, 2}) {
    const Poly p = t() * t() - Poly(d);
    const RootSplit s = poly_split_roots(p);
    ASSERT_EQ(s.roots.size(), 2u) << d;
    for (const auto& [r, m] : s.roots) EXPECT_EQ(r * r, Scalar(d));
    EXPECT_EQ(expand(s), p);
  }
  EXPECT_EQ(poly_split_roots(t() * t() - Poly(19)).unsplit.size(), 1u);
  RootSearchBudget small;
  small.conductor_max = 12;
  EXPECT_EQ(poly_split_roots(t() * t() - Poly(17), small).unsplit.size(), 1u);
}

TEST(SplitRoots, LargeConductorsAreSkippedQuickly) {
  // A cubic without cyclotomic roots must not enumerate Q(zeta_23).
  const Poly p = t() * t() * t() - t() - Poly(1);
  const RootSplit s = poly_split_roots(p);
  EXPECT_TRUE(s.roots.empty());
  EXPECT_EQ(s.unsplit.size(), 1u);
}

TEST(Laurent, DeterminantIsMultiplicative) {
  std::mt19937 rng(13);
  const auto z = [](int e) { return Laurent1::var(0, e); };
  for (int trial = 0; trial < 30; ++trial) {
    // Unit-determinant factors: unipotent triangular times monomial diagonal.
    auto make = [&]() {
      LaurentMatrix u = LaurentMatrix::identity(3), l = LaurentMatrix::identity(3), d(3, 3);
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j) {
          u(i, j) = Laurent1(static_cast<int>(rng() % 5) - 2) * z(static_cast<int>(rng() % 5) - 2);
          l(j, i) = Laurent1(static_cast<int>(rng() % 5) - 2) * z(static_cast<int>(rng() % 5) - 2);
        }
      for (std::size_t i = 0; i < 3; ++i) d(i, i) = Laurent1(1 + static_cast<int>(rng() % 3)) * z(static_cast<int>(rng() % 7) - 3);
      return LaurentMatrix(u * d * l);
    };
    LaurentMatrix a = make(), b = make();
    auto da = monomial_determinant(a), db = monomial_determinant(b), dab = monomial_determinant(a * b);
    ASSERT_TRUE(da && db && dab);
    EXPECT_EQ(dab->coeff, da->coeff * db->coeff);
    EXPECT_EQ(dab->exponent, da->exponent + db->exponent);
  }
}

TEST(Laurent, NonMonomialDeterminantRejected) {
  LaurentMatrix m(2, 2);
  m(0, 0) = Laurent1::var(0) + Laurent1(1);
  m(1, 1) = Laurent1(1);
  EXPECT_FALSE(monomial_determinant(m).has_value());
}
