#include "oracles.hpp"

#include "levyflat/models.hpp"
#include "levyflat/spde.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace levyflat;

namespace {

HVector v3(const SpacePtr& s, double a, double b, double c) { return HVector(s, std::vector<double>{a, b, c}); }

// Node slopes of the monotone cubic, recomputed from scratch: local quartic
// through five nodes by a Vandermonde solve, then the Fritsch-Carlson limiter:
// zero at extrema and flat intervals, radius-3 rescaling per interval.
Eigen::VectorXd node_slopes(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::Index n = x.size();
  const Eigen::Index width = std::min<Eigen::Index>(5, n);
  Eigen::VectorXd m(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index first = std::clamp<Eigen::Index>(i - width / 2, 0, n - width);
    Eigen::MatrixXd v(width, width);
    for (Eigen::Index r = 0; r < width; ++r)
      for (Eigen::Index c = 0; c < width; ++c) v(r, c) = std::pow(x[first + r] - x[i], static_cast<double>(c));
    const Eigen::VectorXd coef = v.fullPivLu().solve(y.segment(first, width));
    m[i] = coef[1];
  }
  // The shift holds the last value, so the interpolant ends flat.
  m[n - 1] = 0;
  auto sgn = [](double v) { return (v > 0) - (v < 0); };
  for (Eigen::Index i = 0; i < n; ++i) {
    const int l = sgn(y[std::max<Eigen::Index>(i, 1)] - y[std::max<Eigen::Index>(i, 1) - 1]);
    const int r = sgn(y[std::min<Eigen::Index>(i + 1, n - 1)] - y[std::min<Eigen::Index>(i + 1, n - 1) - 1]);
    if (l == 0 || l != r || sgn(m[i]) != l) m[i] = 0;
  }
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const double d = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
    if (d == 0) continue;
    const double a = m[k] / d, b = m[k + 1] / d;
    if (a * a + b * b > 9) {
      const double tau = 3 / std::sqrt(a * a + b * b);
      m[k] = tau * a * d;
      m[k + 1] = tau * b * d;
    }
  }
  return m;
}

// dr/dt = slopes(r) + alpha; the last row is frozen by the flat extrapolation.
Eigen::VectorXd mol_rhs(const Eigen::VectorXd& x, const Eigen::VectorXd& r, const Eigen::VectorXd& alpha) {
  Eigen::VectorXd d = node_slopes(x, r);
  d[x.size() - 1] = 0.0;
  return d + alpha;
}

Eigen::VectorXd rk4(const Eigen::VectorXd& x, Eigen::VectorXd r, const Eigen::VectorXd& alpha, double horizon,
                    int steps) {
  const double h = horizon / steps;
  for (int i = 0; i < steps; ++i) {
    const Eigen::VectorXd k1 = mol_rhs(x, r, alpha);
    const Eigen::VectorXd k2 = mol_rhs(x, r + 0.5 * h * k1, alpha);
    const Eigen::VectorXd k3 = mol_rhs(x, r + 0.5 * h * k2, alpha);
    const Eigen::VectorXd k4 = mol_rhs(x, r + h * k3, alpha);
    r += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return r;
}

SPDEProblem constant_problem(const SpacePtr& s, Semigroup sg, LevyDriver driver, const HVector& a,
                             const std::vector<HVector>& sig, const std::vector<HVector>& gam) {
  Coefficients c;
  c.alpha = constant_field(a);
  for (const auto& v : sig) c.sigma.push_back(constant_field(v));
  for (const auto& v : gam) c.gamma.push_back(constant_field(v));
  return SPDEProblem(s, std::move(sg), std::move(c), std::move(driver));
}

}  // namespace

TEST(JumpCoefficient, ZeroScalingAdditivity) {
  auto s = GridSpace::euclidean(3);
  const HVector g1 = v3(s, 1, 2, 3), g2 = v3(s, -1, 0, 4);
  const auto one = constant_problem(s, Semigroup::identity(s), LevyDriver(0, {JumpMeasureSpec::uniform(1, 0, 1)}),
                                    HVector::zero(s), {}, {g1});
  const auto two = constant_problem(
      s, Semigroup::identity(s),
      LevyDriver(0, {JumpMeasureSpec::uniform(1, 0, 1), JumpMeasureSpec::uniform(1, 0, 1)}), HVector::zero(s), {},
      {g1, g2});
  const HVector h = v3(s, 0.1, 0.2, 0.3);
  EXPECT_EQ(norm(jump_coefficient(two, h, Eigen::Vector2d(0, 0))), 0.0);
  EXPECT_EQ(jump_coefficient(one, h, Eigen::VectorXd::Constant(1, 2.0)).coeffs(), (2.0 * g1).coeffs());
  EXPECT_EQ(jump_coefficient(two, h, Eigen::Vector2d(1, 1)).coeffs(), (g1 + g2).coeffs());
}

TEST(SPDEProblem, ShapeMismatchIsStructural) {
  auto s = GridSpace::euclidean(3);
  EXPECT_THROW(constant_problem(s, Semigroup::identity(s), LevyDriver(1, {}), HVector::zero(s), {}, {}),
               StructuralError);
}

TEST(SimulateMild, HomogeneousCaseFollowsSemigroup) {
  auto s = GridSpace::euclidean(3);
  Eigen::MatrixXd rot = Eigen::MatrixXd::Zero(3, 3);
  rot(0, 1) = -1;
  rot(1, 0) = 1;
  const Semigroup sg = Semigroup::matrix_generator(s, rot);
  const auto prob = constant_problem(s, sg, LevyDriver(0, {}), HVector::zero(s), {}, {});
  const HVector h0 = v3(s, 1, 0.5, -2);
  const MildPath path = simulate_mild(prob, h0, 1.0, 0.01, 1);
  EXPECT_LT(norm(path.terminal() - sg.apply(1.0, h0)), 1e-12);
}

TEST(SimulateMild, ConstantDriftIsExact) {
  auto s = GridSpace::euclidean(3);
  const HVector a = v3(s, 0.3, -1, 2);
  const auto prob = constant_problem(s, Semigroup::identity(s), LevyDriver(0, {}), a, {}, {});
  const HVector h0 = v3(s, 1, 2, 3);
  const MildPath path = simulate_mild(prob, h0, 1.0, 0.01, 1);
  EXPECT_LT(norm(path.terminal() - (h0 + 1.0 * a)), 1e-12);
}

TEST(SimulateMild, SingleJumpHandArithmetic) {
  auto s = GridSpace::euclidean(3);
  const HVector g = v3(s, 0.5, 1, -1);
  const double lambda = 1.3;
  const auto prob = constant_problem(s, Semigroup::identity(s), LevyDriver(0, {JumpMeasureSpec::atoms(lambda, {{0.7, 1.0}})}),
                                     HVector::zero(s), {}, {g});
  const HVector h0 = v3(s, 1, 2, 3);
  bool found = false;
  for (std::uint64_t seed = 0; seed < 200 && !found; ++seed) {
    const DriverPath noise = sample_path(prob.driver(), 1.0, 0.01, seed);
    if (noise.events.size() != 1) continue;
    found = true;
    const MildPath path = simulate_mild(prob, h0, noise);
    const HVector expect = h0 + 0.7 * g + (-lambda * 0.7 * 1.0) * g;
    EXPECT_LT(norm(path.terminal() - expect), 1e-12);
  }
  EXPECT_TRUE(found);
}

TEST(SimulateMild, JumpStatesAreExactlyPrePlusCoefficient) {
  const ModelInstance affine = build_fixture("affine-2d");
  const HVector h0 = affine.manifold.point(affine.path_starts[0]);
  const MildPath path = simulate_mild(affine.problem, h0, 2.0, 0.01, 12);
  int jumps = 0;
  for (std::size_t i = 0; i + 1 < path.states.size(); ++i) {
    const auto& a = path.states[i];
    if (a.flag != StateFlag::PreJump) continue;
    const auto& b = path.states[i + 1];
    ASSERT_EQ(b.flag, StateFlag::PostJump);
    EXPECT_EQ(a.time, b.time);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(affine.problem.driver().q());
    x[a.jump_coordinate] = a.jump_size;
    EXPECT_EQ(b.value.coeffs(), (a.value + jump_coefficient(affine.problem, a.value, x)).coeffs());
    ++jumps;
  }
  EXPECT_GT(jumps, 3);
}

TEST(SimulateMild, BitIdenticalForSameSeed) {
  const ModelInstance hjmm = build_hjmm_vasicek();
  const HVector h0 = hjmm.manifold.point(hjmm.path_starts[0]);
  const MildPath a = simulate_mild(hjmm.problem, h0, 0.5, 0.01, 3);
  const MildPath b = simulate_mild(hjmm.problem, h0, 0.5, 0.01, 3);
  ASSERT_EQ(a.states.size(), b.states.size());
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    EXPECT_EQ(a.states[i].time, b.states[i].time);
    EXPECT_EQ(a.states[i].value.coeffs(), b.states[i].value.coeffs());
  }
}

TEST(SimulateMild, ZeroNoiseHjmmMatchesMethodOfLinesOracle) {
  const VasicekParams p;
  const ModelInstance hjmm = build_hjmm_vasicek(p);
  const SpacePtr space = hjmm.problem.space();
  const HVector alpha = hjm_drift(p, vasicek_driver(p), space);
  const auto quiet = constant_problem(space, Semigroup::shift(space), LevyDriver(0, {}), alpha, {}, {});
  const HVector h0 = HVector::sample(space, [&](double xi) { return nelson_siegel(p, xi); });
  const MildPath path = simulate_mild(quiet, h0, 1.0, 1e-3, 0);
  const Eigen::VectorXd expect = rk4(space->points(), h0.coeffs(), alpha.coeffs(), 1.0, 20000);
  EXPECT_LT((path.terminal().coeffs() - expect).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(ConvergenceOrder, DeterministicLinearDrift) {
  auto s = GridSpace::euclidean(3);
  Eigen::MatrixXd a(3, 3);
  a << -1.0, 0.5, 0.0, -0.5, -1.0, 0.3, 0.0, 0.0, -2.0;
  Eigen::MatrixXd b(3, 3);
  b << 0.2, 1.0, 0.0, 0.0, -0.3, 0.5, 0.4, 0.0, 0.1;
  Coefficients c;
  c.alpha = [b, s](const HVector& h) { return HVector(s, Eigen::VectorXd(b * h.coeffs())); };
  const SPDEProblem prob(s, Semigroup::matrix_generator(s, a), std::move(c), LevyDriver(0, {}));
  const auto r = convergence_order(prob, v3(s, 1, -1, 2), 1.0, {0.1, 0.05, 0.025, 0.0125}, 1, 0, 0.000625);
  ASSERT_FALSE(r.skipped);
  EXPECT_GE(r.slope, 0.9);
}

TEST(ConvergenceOrder, PureJumpConstantGammaIsSkipped) {
  auto s = GridSpace::euclidean(3);
  const auto prob = constant_problem(s, Semigroup::identity(s), LevyDriver(0, {JumpMeasureSpec::uniform(3, 0, 0.5)}),
                                     HVector::zero(s), {}, {v3(s, 1, 0, 2)});
  const auto r = convergence_order(prob, v3(s, 1, 1, 1), 1.0, {0.1, 0.05, 0.025}, 50, 4, 0.0125);
  EXPECT_TRUE(r.skipped);
  EXPECT_TRUE(std::isnan(r.slope));
}

TEST(ConvergenceOrder, WienerConstantSigma) {
  auto s = GridSpace::euclidean(3);
  Eigen::MatrixXd a(3, 3);
  a << -1.0, 0.5, 0.0, -0.5, -1.0, 0.3, 0.0, 0.0, -2.0;
  const auto prob = constant_problem(s, Semigroup::matrix_generator(s, a), LevyDriver(1, {}), HVector::zero(s),
                                     {v3(s, 0.3, 0.5, -0.4)}, {});
  const auto r = convergence_order(prob, v3(s, 1, -1, 2), 1.0, {0.1, 0.05, 0.025, 0.0125}, 500, 9, 0.000625);
  ASSERT_FALSE(r.skipped);
  EXPECT_GE(r.slope, 0.4);
}

TEST(ConvergenceOrder, RejectsNonMultipleSteps) {
  auto s = GridSpace::euclidean(3);
  const auto prob = constant_problem(s, Semigroup::identity(s), LevyDriver(0, {}), HVector::zero(s), {}, {});
  EXPECT_THROW(convergence_order(prob, v3(s, 1, 1, 1), 1.0, {0.1, 0.03}, 1, 0, 0.02), ConfigError);
}
