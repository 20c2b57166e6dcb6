#include "levyflat/errors.hpp"
#include "levyflat/hilbert.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

using namespace levyflat;

TEST(Inner, ZeroVectors) {
  auto s = GridSpace::euclidean(3);
  EXPECT_EQ(inner(HVector::zero(s), HVector::zero(s)), 0.0);
}

TEST(Inner, UnitWeightsFirstAxis) {
  auto s = GridSpace::euclidean(4);
  const std::vector<double> e1{1, 0, 0, 0};
  EXPECT_DOUBLE_EQ(inner(HVector(s, e1), HVector(s, e1)), 1.0);
}

TEST(Inner, HandQuadrature) {
  // 0.5 * 1 * 3 + 0.5 * 2 * 4
  auto s = std::make_shared<const GridSpace>(std::vector<double>{0, 1}, std::vector<double>{0.5, 0.5}, "half");
  const std::vector<double> u{1, 2}, v{3, 4};
  EXPECT_DOUBLE_EQ(inner(HVector(s, u), HVector(s, v)), 5.5);
}

TEST(Inner, NormIsSqrtOfSelfInner) {
  auto s = GridSpace::uniform(0.0, 1.0, 11);
  HVector v = HVector::sample(s, [](double x) { return x; });
  // Trapezoid of x^2 on 11 nodes: 1/3 + h^2/6.
  EXPECT_NEAR(norm(v) * norm(v), 1.0 / 3.0 + 0.01 / 6.0, 1e-14);
}

TEST(GridSpace, TrapezoidWeightsSumToLength) {
  auto s = GridSpace::chebyshev(0.0, 10.0, 64);
  EXPECT_NEAR(s->weights().sum(), 10.0, 1e-12);
  EXPECT_DOUBLE_EQ(s->points()[0], 0.0);
  EXPECT_DOUBLE_EQ(s->points()[63], 10.0);
  // Clustered at both ends.
  EXPECT_LT(s->points()[1] - s->points()[0], s->points()[32] - s->points()[31]);
}

TEST(GridSpace, RejectsBadInput) {
  EXPECT_THROW(GridSpace({0.0}, {1.0}, "one"), ConfigError);
  EXPECT_THROW(GridSpace({0.0, 1.0}, {1.0, 0.0}, "zero weight"), ConfigError);
  EXPECT_THROW(GridSpace({1.0, 0.0}, {1.0, 1.0}, "decreasing"), ConfigError);
  EXPECT_THROW(GridSpace({0.0, 1.0}, {1.0}, "length"), ConfigError);
  EXPECT_THROW(GridSpace::uniform(1.0, 0.0, 5), ConfigError);
}

TEST(HVector, RejectsNonFinite) {
  auto s = GridSpace::euclidean(2);
  const std::vector<double> bad{1.0, std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(HVector(s, bad), NumericError);
  const std::vector<double> big{1e308, 1e308};
  HVector v(s, big);
  EXPECT_THROW(v *= 10.0, NumericError);
}

TEST(HVector, MixingSpacesIsStructural) {
  auto a = GridSpace::euclidean(3);
  auto b = GridSpace::uniform(0.0, 1.0, 3);
  EXPECT_THROW(inner(HVector::zero(a), HVector::zero(b)), StructuralError);
  EXPECT_THROW(HVector::zero(a) + HVector::zero(b), StructuralError);
}

TEST(HVector, EuclideanFrameCarriesWeights) {
  auto s = std::make_shared<const GridSpace>(std::vector<double>{0, 1, 2}, std::vector<double>{4, 1, 0.25}, "w");
  const std::vector<double> vals{1, 1, 1};
  const Eigen::VectorXd e = HVector(s, vals).euclidean();
  EXPECT_DOUBLE_EQ(e[0], 2.0);
  EXPECT_DOUBLE_EQ(e[1], 1.0);
  EXPECT_DOUBLE_EQ(e[2], 0.5);
  EXPECT_DOUBLE_EQ(e.squaredNorm(), 5.25);
}
