#include "oracles.hpp"

#include "levyflat/errors.hpp"
#include "levyflat/interpolation.hpp"
#include "levyflat/semigroup.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace levyflat;

namespace {

std::vector<Semigroup> built_ins() {
  auto e3 = GridSpace::euclidean(3);
  Eigen::MatrixXd rot = Eigen::MatrixXd::Zero(3, 3);
  rot(0, 1) = -1;
  rot(1, 0) = 1;
  Eigen::MatrixXd damp = -Eigen::MatrixXd::Identity(3, 3);
  damp(0, 2) = 0.4;
  return {Semigroup::identity(e3), Semigroup::matrix_generator(e3, rot), Semigroup::matrix_generator(e3, damp),
          Semigroup::shift(GridSpace::chebyshev(0.0, 10.0, 64)), Semigroup::shift(GridSpace::uniform(0.0, 5.0, 41))};
}

HVector random_vector(const SpacePtr& s, std::mt19937_64& rng) {
  return HVector(s, Eigen::VectorXd(oracle::gaussian(s->dim(), 1, rng).col(0)));
}

}  // namespace

TEST(Semigroup, TimeZeroIsIdentity) {
  std::mt19937_64 rng(1);
  for (const auto& s : built_ins()) {
    const HVector v = random_vector(s.space(), rng);
    EXPECT_EQ(apply_semigroup(s, 0.0, v).coeffs(), v.coeffs()) << to_string(s.kind());
  }
}

TEST(Semigroup, NegativeTimeIsDomainError) {
  for (const auto& s : built_ins()) {
    EXPECT_THROW(s.apply(-0.1, HVector::zero(s.space())), DomainError);
  }
}

TEST(Semigroup, ShiftReproducesLinearFunction) {
  auto space = GridSpace::chebyshev(0.0, 10.0, 64);
  const Semigroup s = Semigroup::shift(space);
  const HVector v = HVector::sample(space, [](double x) { return x; });
  const HVector out = s.apply(0.3, v);
  // The last interval ends flat to meet the constant extrapolation.
  const double last_interior = space->points()[space->dim() - 2];
  for (int i = 0; i < space->dim(); ++i) {
    const double xi = space->points()[i];
    if (xi + 0.3 <= last_interior) {
      EXPECT_NEAR(out[i], xi + 0.3, 1e-12) << xi;
    }
  }
}

TEST(Semigroup, ShiftHoldsLastValueBeyondGrid) {
  auto space = GridSpace::uniform(0.0, 1.0, 11);
  const Semigroup s = Semigroup::shift(space);
  const HVector v = HVector::sample(space, [](double x) { return std::exp(x); });
  const HVector out = s.apply(2.0, v);
  for (int i = 0; i < space->dim(); ++i) EXPECT_DOUBLE_EQ(out[i], std::exp(1.0));
}

TEST(Semigroup, NegativeIdentityGeneratorScales) {
  auto space = GridSpace::euclidean(4);
  const Semigroup s = Semigroup::matrix_generator(space, -Eigen::MatrixXd::Identity(4, 4));
  std::mt19937_64 rng(2);
  const HVector v = random_vector(space, rng);
  EXPECT_LT(norm(s.apply(1.0, v) - std::exp(-1.0) * v), 1e-15 * norm(v) * 10);
}

TEST(Semigroup, PseudoContractivityOnBuiltIns) {
  std::mt19937_64 rng(3);
  for (const auto& s : built_ins()) {
    for (int i = 0; i < 50; ++i) {
      const HVector v = random_vector(s.space(), rng);
      for (double t : {0.01, 0.1, 0.7, 2.0}) {
        EXPECT_LE(norm(s.apply(t, v)), std::exp(s.beta() * t) * norm(v) * (1 + 1e-12)) << to_string(s.kind());
      }
    }
  }
}

TEST(Semigroup, MatrixGeneratorSemigroupLaw) {
  std::mt19937_64 rng(4);
  for (const auto& s : built_ins()) {
    if (s.kind() == Semigroup::Kind::ShiftInterpolating) continue;
    for (int i = 0; i < 20; ++i) {
      const HVector v = random_vector(s.space(), rng);
      const HVector a = s.apply(0.9, v);
      const HVector b = s.apply(0.4, s.apply(0.5, v));
      EXPECT_LT(norm(a - b), 1e-8 * (1 + norm(v)));
    }
  }
}

TEST(Semigroup, ShiftMeasuresItsDefect) {
  const Semigroup s = Semigroup::shift(GridSpace::chebyshev(0.0, 10.0, 64));
  EXPECT_TRUE(std::isfinite(s.beta()));
  EXPECT_GE(s.beta(), 0.0);
  EXPECT_TRUE(std::isfinite(s.semigroup_defect()));
  EXPECT_LT(s.semigroup_defect(), 1e-2);
}

TEST(Semigroup, IntegrateOrbitMatchesSimpson) {
  std::mt19937_64 rng(5);
  for (const auto& s : built_ins()) {
    const HVector v = s.kind() == Semigroup::Kind::ShiftInterpolating
                          ? HVector::sample(s.space(), [](double x) { return std::cos(x) + 0.1 * x; })
                          : random_vector(s.space(), rng);
    const double t = 0.8;
    const int n = 400;
    const double h = t / n;
    HVector acc = s.apply(0.0, v) + s.apply(t, v);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * s.apply(i * h, v);
    acc *= h / 3.0;
    EXPECT_LT(norm(s.integrate_orbit(t, v) - acc), 1e-6 * (1 + norm(acc))) << to_string(s.kind());
  }
}

TEST(MonotoneCubic, ReproducesMonotoneCubicPolynomial) {
  Eigen::VectorXd x(12), y(12);
  for (int i = 0; i < 12; ++i) {
    x[i] = 2.0 * i / 11.0 + 0.01 * (i % 3);
    y[i] = x[i] * x[i] * x[i] + x[i];
  }
  const MonotoneCubic f(x, y);
  for (double t = x[0]; t <= x[11]; t += 0.013) {
    EXPECT_NEAR(f(t), t * t * t + t, 1e-12);
    EXPECT_NEAR(f.derivative(t), 3 * t * t + 1, 1e-10);
  }
  const double a = 0.3, b = 1.7;
  const auto prim = [](double t) { return t * t * t * t / 4 + t * t / 2; };
  EXPECT_NEAR(f.integral(a, b), prim(b) - prim(a), 1e-12);
}

TEST(MonotoneCubic, PreservesMonotoneData) {
  Eigen::VectorXd x(8), y(8);
  x << 0, 1, 2, 3, 4, 5, 6, 7;
  y << 0, 0, 0, 1, 1, 1, 5, 5;
  const MonotoneCubic f(x, y);
  double prev = f(0.0);
  for (double t = 0.0; t <= 7.0; t += 0.01) {
    EXPECT_GE(f(t), prev - 1e-14);
    prev = f(t);
  }
}

TEST(MonotoneCubic, ConstantExtrapolationAndIntegral) {
  Eigen::VectorXd x(5), y(5);
  x << 0, 1, 2, 3, 4;
  y << 1, 2, 4, 8, 16;
  const MonotoneCubic f(x, y);
  EXPECT_EQ(f(-3.0), 1.0);
  EXPECT_EQ(f(9.0), 16.0);
  EXPECT_EQ(f.derivative(9.0), 0.0);
  EXPECT_NEAR(f.integral(4.0, 6.0), 32.0, 1e-14);
  EXPECT_NEAR(f.integral(1.0, 3.0), -f.integral(3.0, 1.0), 1e-14);
}

TEST(LagrangeWeights, DifferentiateQuartics) {
  Eigen::VectorXd x(7);
  x << 0.0, 0.3, 0.5, 1.1, 1.2, 2.0, 2.6;
  for (Eigen::Index i = 0; i < 5; ++i) {
    const Eigen::VectorXd w = lagrange_derivative_weights(x, 1, 5, 1 + i);
    double d = 0.0;
    for (int j = 0; j < 5; ++j) {
      const double t = x[1 + j];
      d += w[j] * (t * t * t * t - 2 * t);
    }
    const double t = x[1 + i];
    EXPECT_NEAR(d, 4 * t * t * t - 2, 1e-10);
  }
}
