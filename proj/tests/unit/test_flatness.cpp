#include "oracles.hpp"

#include "levyflat/flatness.hpp"
#include "levyflat/models.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace levyflat;

namespace {

ChartPoint at1(double y) { return ChartPoint{0, Eigen::VectorXd::Constant(1, y)}; }
ChartPoint at2(double a, double b) { return ChartPoint{0, Eigen::Vector2d(a, b)}; }

// Cylinder around the first axis, for an axis orthogonal to the fixture's.
Manifold x_cylinder() {
  auto s = GridSpace::euclidean(3);
  ChartMap map = [](const Eigen::VectorXd& y) { return Eigen::Vector3d(y[1], std::cos(y[0]), std::sin(y[0])).eval(); };
  CoordinateBox box{Eigen::VectorXd::Constant(2, -10), Eigen::VectorXd::Constant(2, 10)};
  return Manifold(s, {ManifoldChart(box, map)});
}

}  // namespace

TEST(FlatnessAt, SineGraphIsZeroEverywhere) {
  const ModelInstance sine = build_sine_counterexample();
  for (double xi : {-2.0, -0.7, 0.0, 0.25, 0.4, 1.9}) {
    EXPECT_EQ(flatness_at(sine.manifold, at1(xi)).flatness, 0) << xi;
  }
}

TEST(FlatnessAt, AffineIsFull) {
  const ModelInstance affine = build_fixture("affine-2d");
  const FlatnessReport r = flatness_at(affine.manifold, at2(0.3, -1.0));
  EXPECT_EQ(r.flatness, 2);
  EXPECT_LT(max_principal_angle(r.common_subspace, *affine.analytic_l), 1e-8);
}

TEST(FlatnessAt, CylinderKeepsTheAxis) {
  const ModelInstance cyl = build_fixture("cylinder");
  const FlatnessReport r = flatness_at(cyl.manifold, at2(0.5, 0.2));
  ASSERT_EQ(r.flatness, 1);
  EXPECT_LT(max_principal_angle(r.common_subspace, *cyl.analytic_l), 1e-8);
  EXPECT_EQ(r.samples_used, 32);
  EXPECT_EQ(r.spectrum.size(), 2u);
  EXPECT_GT(r.singular_value_gap, 0.01);
}

TEST(FlatnessAt, AffineAndSineForAllSeedsAndRadii) {
  const ModelInstance affine = build_fixture("affine-2d");
  const ModelInstance sine = build_sine_counterexample();
  for (double radius : {0.01, 0.05, 0.1, 0.25, 0.5}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const FlatnessOptions o{.radius = radius, .n_samples = 32, .tol = 1e-8, .seed = seed};
      EXPECT_EQ(flatness_at(affine.manifold, at2(-1.0, 0.5), o).flatness, 2);
      EXPECT_EQ(flatness_at(sine.manifold, at1(0.1 * static_cast<double>(seed)), o).flatness, 0);
    }
  }
}

TEST(FlatnessAt, ReportEchoesSamplingParameters) {
  const ModelInstance cyl = build_fixture("cylinder");
  const FlatnessReport r = flatness_at(cyl.manifold, at2(0.0, 0.0), {.radius = 0.2, .n_samples = 7, .tol = 1e-9, .seed = 99});
  EXPECT_EQ(r.radius, 0.2);
  EXPECT_EQ(r.samples_used, 7);
  EXPECT_EQ(r.tol, 1e-9);
  EXPECT_EQ(r.seed, 99u);
}

TEST(FlatnessAt, SampleSetsAreNestedAndDNeverGrows) {
  std::vector<ModelInstance> models;
  models.push_back(build_hjmm_vasicek());
  models.push_back(build_fixture("cylinder"));
  models.push_back(build_sine_counterexample());
  for (const auto& model : models) {
    const ChartPoint base = model.samples[model.samples.size() / 2];
    const auto small = sample_coordinate_ball(model.manifold, base, 0.1, 4, 5);
    const auto large = sample_coordinate_ball(model.manifold, base, 0.1, 32, 5);
    for (std::size_t i = 0; i < small.size(); ++i) EXPECT_EQ(small[i].coords, large[i].coords);
    int previous = model.manifold.dim();
    for (int n : {1, 2, 4, 8, 16, 32}) {
      const int d = flatness_at(model.manifold, base, {.radius = 0.1, .n_samples = n, .tol = 1e-8, .seed = 5}).flatness;
      EXPECT_LE(d, previous) << model.name << " n=" << n;
      previous = d;
    }
  }
}

TEST(SampleBall, StaysInsideBallAndBox) {
  const ModelInstance hjmm = build_hjmm_vasicek();
  const ChartPoint base = at2(-0.45, 4.95);
  const auto pts = sample_coordinate_ball(hjmm.manifold, base, 0.1, 50, 3);
  ASSERT_EQ(pts.size(), 50u);
  for (const auto& p : pts) {
    EXPECT_LE((p.coords - base.coords).norm(), 0.1 + 1e-15);
    EXPECT_TRUE(hjmm.manifold.chart(0).domain().contains(p.coords));
  }
}

TEST(FlatnessGlobal, AffineIsDimension) {
  const ModelInstance affine = build_fixture("affine-2d");
  EXPECT_EQ(flatness_global(affine.manifold, affine.samples).flatness, 2);
}

TEST(FlatnessGlobal, SineWithSpreadPointsIsZero) {
  const ModelInstance sine = build_sine_counterexample();
  const std::vector<ChartPoint> plan{at1(-2.1), at1(-0.9), at1(0.05), at1(0.6), at1(1.7)};
  const GlobalFlatness g = flatness_global(sine.manifold, plan);
  EXPECT_EQ(g.flatness, 0);
  EXPECT_EQ(g.per_point.size(), 5u);
}

TEST(FlatnessGlobal, HjmmIsOneAlongAnalyticDirection) {
  const ModelInstance hjmm = build_hjmm_vasicek();
  const GlobalFlatness g = flatness_global(hjmm.manifold, hjmm.samples);
  EXPECT_EQ(g.flatness, 1);
  for (const auto& r : g.per_point) {
    ASSERT_EQ(r.flatness, 1);
    EXPECT_LT(max_principal_angle(r.common_subspace, *hjmm.analytic_l), 1e-6);
  }
}

TEST(FlatnessGlobal, PerPointSeedsFollowSplittingRule) {
  const ModelInstance cyl = build_fixture("cylinder");
  const GlobalFlatness g = flatness_global(cyl.manifold, cyl.samples, {.seed = 42});
  for (std::size_t i = 0; i < g.per_point.size(); ++i) EXPECT_EQ(g.per_point[i].seed, derive_seed(42, i));
}

TEST(ChainConsistency, AffineReportsAgree) {
  const ModelInstance affine = build_fixture("affine-2d");
  std::vector<FlatnessReport> reports;
  for (const auto& p : affine.chain) reports.push_back(flatness_at(affine.manifold, p));
  const auto pairs = overlapping_pairs(reports);
  EXPECT_EQ(pairs.size(), reports.size() - 1);
  EXPECT_TRUE(chain_consistency(reports, pairs, 1e-6).consistent);
}

TEST(ChainConsistency, CylinderAlongThetaSharesTheAxis) {
  const ModelInstance cyl = build_fixture("cylinder");
  std::vector<FlatnessReport> reports;
  for (int i = 0; i < 8; ++i) reports.push_back(flatness_at(cyl.manifold, at2(0.15 * i, 0.0)));
  const auto pairs = overlapping_pairs(reports);
  ASSERT_EQ(pairs.size(), 7u);
  const ChainCheck c = chain_consistency(reports, pairs, 1e-6);
  EXPECT_TRUE(c.consistent);
  for (const auto& r : reports) EXPECT_LT(max_principal_angle(r.common_subspace, *cyl.analytic_l), 1e-8);
}

TEST(ChainConsistency, OrthogonalCommonSubspacesDisagree) {
  const ModelInstance cyl = build_fixture("cylinder");
  const Manifold other = x_cylinder();
  std::vector<FlatnessReport> reports{flatness_at(cyl.manifold, at2(0.0, 0.0)), flatness_at(other, at2(0.0, 0.0))};
  ASSERT_EQ(reports[0].flatness, 1);
  ASSERT_EQ(reports[1].flatness, 1);
  const std::vector<std::pair<std::size_t, std::size_t>> pairs{{0, 1}};
  const ChainCheck c = chain_consistency(reports, pairs, 1e-6);
  EXPECT_FALSE(c.consistent);
  EXPECT_NEAR(c.angles[0], oracle::kPi / 2, 1e-8);
}

TEST(Decompose, AffineFullTangent) {
  const ModelInstance affine = build_fixture("affine-2d");
  const Subspace& l = *affine.analytic_l;
  const Decomposition d = decompose(affine.manifold, l, affine.samples, {.shift_extent = affine.shift_extent});
  EXPECT_LT(d.max_residual, 1e-8);
  EXPECT_TRUE(d.tangency_ok);
  const HVector g0 = affine.manifold.point(at2(0.0, 0.0));
  const HVector expect = g0 - project(g0, l);
  for (const auto& n : d.n_points) EXPECT_LT(norm(n - expect), 1e-12);
}

TEST(Decompose, CylinderAxis) {
  const ModelInstance cyl = build_fixture("cylinder");
  const Decomposition d = decompose(cyl.manifold, *cyl.analytic_l, cyl.samples, {.shift_extent = cyl.shift_extent});
  EXPECT_LT(d.max_residual, 1e-8);
  for (const auto& n : d.n_points) {
    EXPECT_NEAR(n[2], 0.0, 1e-14);
    EXPECT_NEAR(std::hypot(n[0], n[1]), 1.0, 1e-14);
  }
}

TEST(Decompose, RoundtripReconstructsPoints) {
  const ModelInstance hjmm = build_hjmm_vasicek();
  const Decomposition d = decompose(hjmm.manifold, *hjmm.analytic_l, hjmm.samples, {.shift_extent = 0.5});
  ASSERT_EQ(d.n_points.size(), hjmm.samples.size());
  for (std::size_t i = 0; i < hjmm.samples.size(); ++i) {
    const HVector h = hjmm.manifold.point(hjmm.samples[i]);
    EXPECT_LT(norm(project(h, *hjmm.analytic_l) + d.n_points[i] - h), 1e-12 * norm(h));
  }
  EXPECT_LT(d.max_residual, 1e-8);
}

TEST(Decompose, SineAlongFirstAxisMatchesBruteForce) {
  const ModelInstance sine = build_sine_counterexample();
  const DecomposeOptions opts{.shift_extent = 0.5, .shifts_per_direction = 4};
  const Decomposition d = decompose(sine.manifold, *sine.analytic_l, sine.samples, opts);
  double expect = 0.0;
  for (const auto& p : sine.samples) {
    const double xi = p.coords[0];
    for (int k = 1; k <= 4; ++k) {
      for (double sign : {-1.0, 1.0}) {
        expect = std::max(expect, oracle::sine_graph_distance(xi + sign * 0.5 * k / 4, std::sin(2 * oracle::kPi * xi)));
      }
    }
  }
  EXPECT_NEAR(d.max_residual, expect, 1e-6);
  EXPECT_GT(d.max_residual, 0.1);
}

// Literal example value: translated sine graph at shift norm 0.5 should sit
// at distance >= 0.5 from the graph. The brute-force supremum is 0.4377.
TEST(Decompose, SineShiftHalfResidualAtLeastHalf) {
  const ModelInstance sine = build_sine_counterexample();
  const Decomposition d = decompose(sine.manifold, *sine.analytic_l, sine.samples, {.shift_extent = 0.5});
  EXPECT_GE(d.max_residual, 0.5);
}

TEST(Classify, DimensionRule) {
  EXPECT_EQ(classify(2, 2), Classification::AffineSpace);
  EXPECT_EQ(classify(2, 1), Classification::Foliation);
  EXPECT_EQ(classify(3, 1), Classification::General);
  EXPECT_EQ(to_string(Classification::Foliation), "Foliation");
}
