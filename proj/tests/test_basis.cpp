#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "npiv/basis.hpp"
#include "npiv/error.hpp"
#include "support.hpp"

using namespace npiv;
using npiv::testing::ref_psi;

TEST(TrigBasis, KnownValues)
{
  EXPECT_EQ(trig_basis(1, 0.37), 1.0);
  EXPECT_NEAR(trig_basis(2, 0.0), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(trig_basis(3, 0.25), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(trig_basis(2, 0.5), -std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(trig_basis(4, 0.25), -std::sqrt(2.0), 1e-14); // cos(pi)
  EXPECT_NEAR(trig_basis(5, 0.125), std::sqrt(2.0), 1e-14); // sin(pi/2)
}

TEST(TrigBasis, RejectsBadInput)
{
  EXPECT_THROW(trig_basis(0, 0.5), DomainError);
  EXPECT_THROW(trig_basis(2, -0.1), DomainError);
  EXPECT_THROW(trig_basis(2, 1.5), DomainError);
  EXPECT_THROW(trig_basis(2, std::nan("")), DomainError);
}

TEST(TrigBasis, FrequencyPairing)
{
  EXPECT_EQ(frequency_of(1), 0);
  EXPECT_EQ(frequency_of(2), 1);
  EXPECT_EQ(frequency_of(3), 1);
  EXPECT_EQ(frequency_of(4), 2);
}

TEST(TrigBasis, RowMatchesPointwise)
{
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const double s = u(gen);
    const Index k = 1 + static_cast<Index>(gen() % 40);
    Vector<double> row(k);
    trig_row(s, k, row);
    for (Index j = 1; j <= k; ++j) {
      EXPECT_NEAR(row(j - 1), ref_psi(j, s), 1e-12) << "j=" << j << " s=" << s;
    }
  }
}

// Orthonormality by the midpoint rule on M points: exact for trigonometric
// polynomials of degree < M, so the Gram matrix is the identity up to rounding.
TEST(TrigBasis, OrthonormalByQuadrature)
{
  const Index k = 31;
  const int M = 256;
  Matrix<double> gram = Matrix<double>::Zero(k, k);
  for (int i = 0; i < M; ++i) {
    const double s = (i + 0.5) / M;
    for (Index l = 1; l <= k; ++l) {
      for (Index j = 1; j <= k; ++j) {
        gram(l - 1, j - 1) += trig_basis(l, s) * trig_basis(j, s) / M;
      }
    }
  }
  EXPECT_LE((gram - Matrix<double>::Identity(k, k)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Weights, BuiltinValues)
{
  EXPECT_EQ(WeightSequence::constant()(17), 1.0);
  const auto sob = WeightSequence::sobolev(2.0);
  EXPECT_EQ(sob(1), 1.0);
  EXPECT_DOUBLE_EQ(sob(3), 81.0);
  const auto der = WeightSequence::derivative(1);
  EXPECT_DOUBLE_EQ(der(2), 4.0);
  const auto poly = WeightSequence::polynomial_decay(1.0);
  EXPECT_EQ(poly(1), 1.0);
  EXPECT_DOUBLE_EQ(poly(4), 1.0 / 16.0);
  const auto ex = WeightSequence::exponential_decay(0.5);
  EXPECT_EQ(ex(1), 1.0);
  EXPECT_DOUBLE_EQ(ex(3), std::exp(-3.0));
}

TEST(Weights, CustomTable)
{
  const auto w = WeightSequence::custom({1.0, 0.5, 0.25});
  EXPECT_EQ(w(2), 0.5);
  EXPECT_EQ(w.extent(), 3);
  EXPECT_THROW(w(4), DomainError);
  EXPECT_THROW(WeightSequence::custom({1.0, 0.0}), DomainError);
  EXPECT_THROW(WeightSequence::custom({}), DomainError);
}

TEST(Weights, ParseRoundTrip)
{
  for (const char* spec : {"constant", "sobolev:2", "derivative:1", "polynomial:0.5", "exponential:0.5",
                           "custom:1,0.25,0.125"}) {
    const auto w = WeightSequence::parse(spec);
    EXPECT_EQ(w.to_string(), spec);
    const auto again = WeightSequence::parse(w.to_string());
    for (Index j = 1; j <= 3; ++j) {
      EXPECT_EQ(w(j), again(j));
    }
  }
}

TEST(Weights, ParseErrors)
{
  EXPECT_THROW(WeightSequence::parse("sobolev"), InputError);
  EXPECT_THROW(WeightSequence::parse("derivative:1.5"), InputError);
  EXPECT_THROW(WeightSequence::parse("gaussian:1"), InputError);
  EXPECT_THROW(WeightSequence::parse("polynomial:-1"), std::exception);
  EXPECT_THROW(WeightSequence::parse("custom:1,x"), InputError);
  EXPECT_THROW(WeightSequence::parse("constant:2"), InputError);
}

TEST(Weights, IndexZeroRejected) { EXPECT_THROW(WeightSequence::constant()(0), DomainError); }

TEST(WeightedNorm, Examples)
{
  Vector<double> f(3);
  f << 1.0, 2.0, 3.0;
  EXPECT_DOUBLE_EQ(weighted_norm_sq(f, WeightSequence::constant()), 14.0);
  EXPECT_DOUBLE_EQ(weighted_norm_sq(f, WeightSequence::derivative(1)), 1.0 + 16.0 + 81.0);
  Vector<double> one(1);
  one << 1.0;
  EXPECT_TRUE(ellipsoid_contains(one, WeightSequence::sobolev(2), 1.0));
  one << 1.01;
  EXPECT_FALSE(ellipsoid_contains(one, WeightSequence::sobolev(2), 1.0));
  EXPECT_THROW(ellipsoid_contains(one, WeightSequence::sobolev(2), 0.0), DomainError);
}
