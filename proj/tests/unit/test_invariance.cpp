#include "oracles.hpp"

#include "levyflat/invariance.hpp"
#include "levyflat/models.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace levyflat;

namespace {

ChartPoint at1(double y) { return ChartPoint{0, Eigen::VectorXd::Constant(1, y)}; }

std::vector<ModelInstance> invariant_models() {
  std::vector<ModelInstance> out;
  out.push_back(build_hjmm_vasicek());
  out.push_back(build_sine_counterexample());
  for (auto& f : build_fixtures()) {
    if (f.expected.invariant) out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

TEST(Tangency, AffineVolatilitiesInPlane) {
  const ModelInstance affine = build_fixture("affine-2d");
  const TestReport r = tangency_test(affine.manifold, affine.problem, {0, 1}, affine.samples);
  EXPECT_LT(r.max_residual, 1e-12);
  EXPECT_EQ(r.verdict, Verdict::Pass);
}

TEST(Tangency, SineWithForcedIndexMatchesClosedForm) {
  const ModelInstance sine = build_sine_counterexample();
  const std::vector<ChartPoint> plan{at1(0.25), at1(0.0)};
  const TestReport r = tangency_test(sine.manifold, sine.problem, {0}, plan);
  ASSERT_EQ(r.details.size(), 2u);
  EXPECT_LT(r.details[0].residual, 1e-12);
  // |(I - P) e1| with tangent (1, 2 pi) / sqrt(1 + 4 pi^2).
  const double expect = 2 * oracle::kPi / std::sqrt(1 + 4 * oracle::kPi * oracle::kPi);
  EXPECT_NEAR(r.details[1].residual, expect, 1e-12);
  EXPECT_EQ(r.verdict, Verdict::Fail);
}

TEST(Tangency, HjmmPasses) {
  const ModelInstance hjmm = build_hjmm_vasicek();
  const auto k = small_jump_indices(hjmm.problem.driver(), hjmm.eps_min);
  ASSERT_EQ(k, std::vector<int>{0});
  const TestReport r = tangency_test(hjmm.manifold, hjmm.problem, k, hjmm.samples);
  EXPECT_GE(r.samples, 50);
  EXPECT_LT(r.max_residual, 1e-8);
  EXPECT_TRUE(r.pass);
}

TEST(Tangency, EmptyIndexSetSkips) {
  const ModelInstance sine = build_sine_counterexample();
  const TestReport r = tangency_test(sine.manifold, sine.problem, {}, sine.samples);
  EXPECT_EQ(r.verdict, Verdict::Skip);
}

TEST(Tangency, EveryInvariantModelWithFiftySamples) {
  for (const auto& m : invariant_models()) {
    ASSERT_GE(m.samples.size(), 50u) << m.name;
    const auto k = small_jump_indices(m.problem.driver(), m.eps_min);
    const TestReport r = tangency_test(m.manifold, m.problem, k, m.samples);
    if (k.empty()) {
      EXPECT_EQ(r.verdict, Verdict::Skip) << m.name;
    } else {
      EXPECT_EQ(r.verdict, Verdict::Pass) << m.name << " " << r.max_residual;
    }
  }
}

TEST(JumpClosure, AffineAnyGrid) {
  const ModelInstance affine = build_fixture("affine-2d");
  const TestReport r = jump_closure_test(affine.manifold, affine.problem, 1, linspace(0.0, 0.1, 7), affine.samples);
  EXPECT_EQ(r.verdict, Verdict::Pass);
}

TEST(JumpClosure, SinePoissonAtomPasses) {
  const ModelInstance sine = build_sine_counterexample();
  const TestReport r = jump_closure_test(sine.manifold, sine.problem, 0, {1.0}, sine.samples);
  EXPECT_EQ(r.verdict, Verdict::Pass);
  EXPECT_LT(r.max_residual, 1e-6);
}

TEST(JumpClosure, SineQuarterShiftFailsLikeBruteForce) {
  const ModelInstance broken = build_fixture("sine-noninvariant");
  const TestReport r = jump_closure_test(broken.manifold, broken.problem, 0, {0.25}, std::vector<ChartPoint>{at1(0.0)});
  const double expect = oracle::sine_graph_distance(0.25, 0.0);
  EXPECT_GT(expect, 0.1);
  EXPECT_NEAR(r.max_residual, expect, 1e-8);
  EXPECT_EQ(r.verdict, Verdict::Fail);
}

TEST(JumpClosure, SizeOutsideSupportIsConfigError) {
  const ModelInstance sine = build_sine_counterexample();
  EXPECT_THROW(jump_closure_test(sine.manifold, sine.problem, 0, {0.5}, sine.samples), ConfigError);
  const ModelInstance hjmm = build_hjmm_vasicek();
  EXPECT_THROW(jump_closure_test(hjmm.manifold, hjmm.problem, 0, {0.5}, hjmm.samples), ConfigError);
}

TEST(JumpClosure, EveryInvariantModelOverItsSupport) {
  for (const auto& m : invariant_models()) {
    const auto k = small_jump_indices(m.problem.driver(), m.eps_min);
    for (int i : k) {
      const Interval hull = m.problem.driver().jump(i).hull();
      const TestReport r =
          jump_closure_test(m.manifold, m.problem, i, linspace(hull.lower, hull.upper, 20), m.samples);
      EXPECT_EQ(r.verdict, Verdict::Pass) << m.name << " k=" << i + 1 << " " << r.max_residual;
    }
  }
}

TEST(PathInvariance, AffineStaysOnPlane) {
  const ModelInstance affine = build_fixture("affine-2d");
  for (double dt : {0.01, 0.003}) {
    PathInvarianceOptions o;
    o.n_paths = 10;
    o.dt = dt;
    o.seed = 4;
    const TestReport r = path_invariance_test(affine.manifold, affine.problem, affine.path_starts, o);
    EXPECT_LT(r.max_residual, 1e-10) << dt;
  }
}

TEST(PathInvariance, HjmmResidualHalvesWhenDtHalves) {
  const ModelInstance hjmm = build_hjmm_vasicek();
  PathInvarianceOptions o;
  o.n_paths = 100;
  o.horizon = 1.0;
  o.dt = 1e-3;
  o.seed = 1;
  const TestReport r = path_invariance_test(hjmm.manifold, hjmm.problem, hjmm.path_starts, o);
  EXPECT_LT(r.max_residual, 1e-2);
  EXPECT_EQ(r.verdict, Verdict::Pass);
  EXPECT_NEAR(r.metrics.at("dt_ratio"), 2.0, 0.6);
}

TEST(PathInvariance, NonInvariantSineFailsAtEveryDt) {
  const ModelInstance broken = build_fixture("sine-noninvariant");
  for (double dt : {0.01, 0.005}) {
    PathInvarianceOptions o;
    o.n_paths = 20;
    o.dt = dt;
    o.seed = 2;
    const TestReport r = path_invariance_test(broken.manifold, broken.problem, broken.path_starts, o);
    EXPECT_GT(r.max_residual, 0.1);
    EXPECT_EQ(r.verdict, Verdict::Fail);
    EXPECT_NEAR(r.metrics.at("dt_ratio"), 1.0, 0.3);
    EXPECT_EQ(r.label.rfind("not consistent", 0), 0u);
  }
}

TEST(PathInvariance, StartOffManifoldIsConfigError) {
  const ModelInstance cyl = build_fixture("cylinder");
  const std::vector<ChartPoint> starts{ChartPoint{0, Eigen::Vector2d(0.0, 0.0)}};
  PathInvarianceOptions o;
  o.n_paths = 0;
  EXPECT_THROW(path_invariance_test(cyl.manifold, cyl.problem, starts, o), ConfigError);
  EXPECT_THROW(path_invariance_test(cyl.manifold, cyl.problem, {}, {}), ConfigError);
}

TEST(PathInvariance, KeptPathsAndTrace) {
  const ModelInstance cyl = build_fixture("cylinder");
  PathInvarianceOptions o;
  o.n_paths = 5;
  o.dt = 0.01;
  std::vector<MildPath> kept(2);
  const TestReport r = path_invariance_test(cyl.manifold, cyl.problem, cyl.path_starts, o, &kept);
  EXPECT_EQ(r.trace.size(), 101u);
  EXPECT_FALSE(kept[0].states.empty());
  EXPECT_FALSE(kept[1].states.empty());
  EXPECT_EQ(r.label.rfind("consistent with invariance at dt=0.01", 0), 0u);
}

TEST(FlatnessBound, PoissonDriverSkips) {
  const ModelInstance sine = build_sine_counterexample();
  const auto k = small_jump_indices(sine.problem.driver(), sine.eps_min);
  EXPECT_TRUE(k.empty());
  EXPECT_EQ(flatness_bound_check(sine.manifold, sine.problem, k, sine.samples).verdict, Verdict::Skip);
}

TEST(FlatnessBound, HjmmFoliation) {
  const ModelInstance hjmm = build_hjmm_vasicek();
  const TestReport r = flatness_bound_check(hjmm.manifold, hjmm.problem, {0}, hjmm.samples);
  EXPECT_EQ(r.verdict, Verdict::Pass);
  EXPECT_EQ(r.metrics.at("d_global"), 1.0);
  EXPECT_EQ(r.metrics.at("flatness_global"), 1.0);
  EXPECT_EQ(classify(2, static_cast<int>(r.metrics.at("flatness_global"))), Classification::Foliation);
}

TEST(FlatnessBound, AffineTwoSourcesGiveAffineSpace) {
  const ModelInstance affine = build_fixture("affine-2d");
  const TestReport r = flatness_bound_check(affine.manifold, affine.problem, {0, 1}, affine.samples);
  EXPECT_EQ(r.verdict, Verdict::Pass);
  EXPECT_EQ(r.metrics.at("d_global"), 2.0);
  EXPECT_EQ(classify(2, static_cast<int>(r.metrics.at("flatness_global"))), Classification::AffineSpace);
}

TEST(FlatnessBound, NeverBelowCommonVolatilitySpanOnInvariantModels) {
  for (const auto& m : invariant_models()) {
    const auto k = small_jump_indices(m.problem.driver(), m.eps_min);
    const TestReport r = flatness_bound_check(m.manifold, m.problem, k, m.samples);
    EXPECT_NE(r.verdict, Verdict::Fail) << m.name;
    if (!k.empty()) EXPECT_GE(r.metrics.at("flatness_global"), r.metrics.at("d_global")) << m.name;
  }
}

TEST(NegativeFixtures, JumpClosureAndPathInvarianceBothFail) {
  for (const auto& m : build_fixtures()) {
    if (m.expected.invariant) continue;
    ASSERT_FALSE(m.jump_grids.empty());
    EXPECT_EQ(jump_closure_test(m.manifold, m.problem, 0, m.jump_grids[0], m.samples).verdict, Verdict::Fail);
    PathInvarianceOptions o;
    o.n_paths = 10;
    o.dt = 0.01;
    EXPECT_EQ(path_invariance_test(m.manifold, m.problem, m.path_starts, o).verdict, Verdict::Fail);
  }
}
