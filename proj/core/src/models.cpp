#include "levyflat/models.hpp"

#include "levyflat/interpolation.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

namespace levyflat {

std::vector<double> linspace(double a, double b, int count) {
  if (count < 1) return {};
  if (count == 1) return {0.5 * (a + b)};
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (count - 1);
  out.back() = b;
  return out;
}

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

ChartPoint at(std::initializer_list<double> y) { return ChartPoint{0, vec(y)}; }

std::vector<ChartPoint> grid_plan(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<ChartPoint> out;
  for (double u : a) {
    for (double v : b) out.push_back(at({u, v}));
  }
  return out;
}

std::vector<ChartPoint> line_plan(const std::vector<double>& a) {
  std::vector<ChartPoint> out;
  for (double u : a) out.push_back(at({u}));
  return out;
}

}  // namespace

LevyDriver vasicek_driver(const VasicekParams& params) {
  std::vector<JumpMeasureSpec> jumps;
  if (params.jumps) jumps.push_back(JumpMeasureSpec::uniform(params.lambda, params.support.lower, params.support.upper));
  return LevyDriver(params.wiener ? 1 : 0, std::move(jumps), params.wiener);
}

double vasicek_volatility(const VasicekParams& params, double xi) { return params.rho * std::exp(-params.c * xi); }

double vasicek_integrated_volatility(const VasicekParams& params, double xi) {
  if (params.c == 0.0) return params.rho * xi;
  return params.rho * (-std::expm1(-params.c * xi)) / params.c;
}

double hjm_drift_at(const VasicekParams& params, const LevyDriver& driver, double xi) {
  if (driver.q() == 0 && !driver.wiener_in_x()) return 0.0;
  return -vasicek_volatility(params, xi) * cumulant_prime(driver, -vasicek_integrated_volatility(params, xi));
}

HVector hjm_drift(const VasicekParams& params, const LevyDriver& driver, const SpacePtr& space) {
  return HVector::sample(space, [&](double xi) { return hjm_drift_at(params, driver, xi); });
}

double nelson_siegel(const VasicekParams& params, double xi) {
  const double u = xi / params.ns_tau;
  const double decay = u > 0.0 ? -std::expm1(-u) / u : 1.0;
  return params.ns_level + params.ns_slope * decay + params.ns_curvature * (decay - std::exp(-u));
}

ModelInstance build_hjmm_vasicek(const VasicekParams& p) {
  if (p.rho == 0.0 || !std::isfinite(p.rho)) throw ConfigError("hjmm-vasicek: rho must be nonzero");
  if (!std::isfinite(p.c)) throw ConfigError("hjmm-vasicek: c must be finite");
  if (!(p.xi_max > 0.0)) throw ConfigError("hjmm-vasicek: xi_max must be positive");
  if (p.n < 5) throw ConfigError("hjmm-vasicek: need at least 5 grid nodes");
  if (!(p.t_max > 2.5) || !(p.t_min < 0.0) || !(p.z_bound > 0.3)) {
    throw ConfigError("hjmm-vasicek: chart box must contain t in [0, 2.5] and z in [-0.3, 0.3]");
  }
  if (p.jumps && !(p.support.lower <= 0.0 && p.support.upper > 0.0)) {
    throw ConfigError("hjmm-vasicek: jump support must contain [0, eps]");
  }

  const SpacePtr space = GridSpace::chebyshev(0.0, p.xi_max, p.n, "chebyshev[0, xi_max]");
  const LevyDriver driver = vasicek_driver(p);
  const HVector gamma = HVector::sample(space, [&](double xi) { return vasicek_volatility(p, xi); });
  const HVector direction = HVector::sample(space, [&](double xi) { return std::exp(-p.c * xi); });
  const HVector alpha = hjm_drift(p, driver, space);
  const HVector h0 = HVector::sample(space, [&](double xi) { return nelson_siegel(p, xi); });

  Coefficients coeffs;
  coeffs.alpha = constant_field(alpha);
  if (p.wiener) coeffs.sigma.push_back(constant_field(gamma));
  if (p.jumps) coeffs.gamma.push_back(constant_field(gamma));
  coeffs.lipschitz_hint = 0.0;
  coeffs.sigma_declared_c1 = true;
  SPDEProblem problem(space, Semigroup::shift(space), std::move(coeffs), driver);

  // phi(t, z) = S_t h0 + int_0^t S_u alpha du + z e^{-c xi}
  const Eigen::VectorXd x = space->points();
  auto curve = std::make_shared<const MonotoneCubic>(x, h0.coeffs(), true);
  auto drift = std::make_shared<const MonotoneCubic>(x, alpha.coeffs(), true);
  const Eigen::VectorXd e = direction.coeffs();
  ChartMap map = [x, curve, drift, e](const Eigen::VectorXd& y) {
    Eigen::VectorXd out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      out[i] = (*curve)(x[i] + y[0]) + drift->integral(x[i], x[i] + y[0]) + y[1] * e[i];
    }
    return out;
  };
  ChartJacobian jac = [x, curve, drift, e](const Eigen::VectorXd& y) {
    Eigen::MatrixXd out(x.size(), 2);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      out(i, 0) = curve->derivative(x[i] + y[0]) + (*drift)(x[i] + y[0]);
      out(i, 1) = e[i];
    }
    return out;
  };
  CoordinateBox box{vec({p.t_min, -p.z_bound}), vec({p.t_max, p.z_bound})};
  Manifold manifold(space, {ManifoldChart(box, map, jac)}, 3, true);

  const HVector cols[] = {direction};
  ModelInstance out{
      .name = "hjmm-vasicek",
      .description = "HJMM forward curves, Vasicek volatility rho*exp(-c xi), X = W + compensated jumps",
      .problem = std::move(problem),
      .manifold = std::move(manifold),
      .analytic_l = orthonormalize(cols),
      .samples = grid_plan(linspace(0.2, 2.5, 10), linspace(-0.3, 0.3, 6)),
      .path_starts = {at({0.0, 0.0})},
      .shift_extent = 1.0,
      .jump_grids = {},
      .eps_min = 1e-3,
      .expected = ExpectedVerdicts{.invariant = true, .flatness = 1, .classification = Classification::Foliation},
      .parameters = {{"rho", p.rho},
                     {"c", p.c},
                     {"lambda", p.lambda},
                     {"support_lower", p.support.lower},
                     {"support_upper", p.support.upper},
                     {"xi_max", p.xi_max},
                     {"n", p.n}},
      .chain = {},
  };
  if (p.jumps) out.jump_grids.push_back(linspace(p.support.lower, p.support.upper, 20));
  for (double t : linspace(0.3, 1.35, 8)) out.chain.push_back(at({t, 0.0}));
  return out;
}

namespace {

Manifold sine_manifold(double half_width) {
  if (!(half_width >= 3.0)) throw ConfigError("sine model: chart must cover at least three periods");
  const SpacePtr space = GridSpace::euclidean(2, "R^2");
  const double two_pi = 2.0 * std::numbers::pi;
  ChartMap map = [two_pi](const Eigen::VectorXd& y) { return vec({y[0], std::sin(two_pi * y[0])}); };
  ChartJacobian jac = [two_pi](const Eigen::VectorXd& y) {
    Eigen::MatrixXd out(2, 1);
    out << 1.0, two_pi * std::cos(two_pi * y[0]);
    return out;
  };
  CoordinateHint hint = [half_width](const HVector& h) {
    std::vector<ChartPoint> out;
    for (int k = -4; k <= 4; ++k) {
      const double xi = h[0] + k / 8.0;
      if (xi >= -half_width && xi <= half_width) out.push_back(at({xi}));
    }
    return out;
  };
  CoordinateBox box{vec({-half_width}), vec({half_width})};
  return Manifold(space, {ManifoldChart(box, map, jac)}, 3, true, hint);
}

ModelInstance sine_instance(std::string name, std::string description, double half_width, JumpMeasureSpec jumps) {
  Manifold manifold = sine_manifold(half_width);
  const SpacePtr space = manifold.ambient();
  const HVector gamma(space, vec({1.0, 0.0}));
  const double intensity = jumps.intensity();
  const double mean = jumps.mean_jump();
  LevyDriver driver(0, {std::move(jumps)});
  Coefficients coeffs;
  // dr = gamma dN = gamma d(N - compensator) + intensity E[jump] gamma dt
  coeffs.alpha = constant_field((intensity * mean) * gamma);
  coeffs.gamma.push_back(constant_field(gamma));
  coeffs.lipschitz_hint = 0.0;
  SPDEProblem problem(space, Semigroup::identity(space), std::move(coeffs), std::move(driver));
  const HVector cols[] = {gamma};
  return ModelInstance{
      .name = std::move(name),
      .description = std::move(description),
      .problem = std::move(problem),
      .manifold = std::move(manifold),
      .analytic_l = orthonormalize(cols),
      .samples = line_plan(linspace(-3.0, 3.0, 50)),
      .path_starts = line_plan({-1.0, -0.3, 0.2, 0.7}),
      .shift_extent = 0.5,
      .jump_grids = {},
      .eps_min = 1e-3,
      .expected = {},
      .parameters = {{"lambda", intensity}, {"half_width", half_width}},
      .chain = {},
  };
}

}  // namespace

ModelInstance build_sine_counterexample(const SineParams& params) {
  ModelInstance m = sine_instance("sine-counterexample",
                                  "graph of sin(2 pi xi) in R^2, gamma = (1, 0), Poisson jumps of size 1",
                                  params.half_width, JumpMeasureSpec::atoms(params.lambda, {{1.0, 1.0}}));
  m.jump_grids = {{1.0}};
  m.chain = line_plan(linspace(0.0, 1.05, 8));
  m.expected = ExpectedVerdicts{.invariant = true,
                                .flatness = 0,
                                .classification = std::nullopt,
                                .jump_closure_pass = true,
                                .path_invariance_pass = true,
                                .flatness_bound_pass = true,
                                .decompose_pass = false};
  return m;
}

namespace {

ModelInstance affine_fixture() {
  const SpacePtr space =
      std::make_shared<const GridSpace>(std::vector<double>{0, 1, 2, 3, 4}, std::vector<double>{0.5, 1.0, 1.5, 0.8, 1.2},
                                        "R^5 weighted");
  const Eigen::VectorXd g0 = vec({0.2, -0.1, 0.3, 0.5, 1.0});
  const Eigen::VectorXd l1 = vec({1.0, 0.0, 1.0, 0.0, 0.0});
  const Eigen::VectorXd l2 = vec({0.0, 1.0, -1.0, 1.0, 0.0});
  Eigen::MatrixXd basis(5, 2);
  basis << l1, l2;
  ChartMap map = [g0, basis](const Eigen::VectorXd& y) { return Eigen::VectorXd(g0 + basis * y); };
  ChartJacobian jac = [basis](const Eigen::VectorXd&) { return basis; };
  // Weighted least squares for the coordinates of the nearest point.
  const Eigen::VectorXd sw = space->sqrt_weights();
  CoordinateHint hint = [g0, basis, sw](const HVector& h) {
    const Eigen::MatrixXd a = sw.asDiagonal() * basis;
    Eigen::VectorXd y = a.colPivHouseholderQr().solve(sw.cwiseProduct(h.coeffs() - g0));
    y = y.cwiseMax(-20.0).cwiseMin(20.0);
    return std::vector<ChartPoint>{ChartPoint{0, y}};
  };
  CoordinateBox box{vec({-20.0, -20.0}), vec({20.0, 20.0})};
  Manifold manifold(space, {ManifoldChart(box, map, jac)}, 3, true, hint);

  const HVector v1(space, l1);
  const HVector v2(space, l2);
  LevyDriver driver(1, {JumpMeasureSpec::uniform(3.0, 0.0, 0.1), JumpMeasureSpec::uniform(2.0, 0.0, 0.1)});
  Coefficients coeffs;
  coeffs.alpha = constant_field(0.1 * v1 - 0.2 * v2);
  coeffs.sigma.push_back(constant_field(0.3 * v1 + 0.2 * v2));
  coeffs.gamma.push_back(constant_field(v1));
  coeffs.gamma.push_back(constant_field(v2 + 0.5 * v1));
  coeffs.lipschitz_hint = 0.0;
  coeffs.sigma_declared_c1 = true;
  SPDEProblem problem(space, Semigroup::identity(space), std::move(coeffs), std::move(driver));
  const HVector cols[] = {v1, v2};
  return ModelInstance{
      .name = "fixture:affine-2d",
      .description = "affine plane g0 + span{l1, l2} in weighted R^5, two small-jump volatilities in the plane",
      .problem = std::move(problem),
      .manifold = std::move(manifold),
      .analytic_l = orthonormalize(cols),
      .samples = grid_plan(linspace(-2.0, 2.0, 8), linspace(-2.0, 2.0, 7)),
      .path_starts = {at({0.0, 0.0}), at({1.0, -1.0})},
      .shift_extent = 2.0,
      .jump_grids = {linspace(0.0, 0.1, 20), linspace(0.0, 0.1, 20)},
      .eps_min = 1e-3,
      .expected = ExpectedVerdicts{.invariant = true, .flatness = 2, .classification = Classification::AffineSpace},
      .parameters = {},
      .chain = grid_plan(linspace(-0.5, 0.55, 8), {0.0}),
  };
}

ModelInstance cylinder_fixture() {
  const SpacePtr space = GridSpace::euclidean(3, "R^3");
  ChartMap map = [](const Eigen::VectorXd& y) { return vec({std::cos(y[0]), std::sin(y[0]), y[1]}); };
  ChartJacobian jac = [](const Eigen::VectorXd& y) {
    Eigen::MatrixXd out(3, 2);
    out << -std::sin(y[0]), 0.0, std::cos(y[0]), 0.0, 0.0, 1.0;
    return out;
  };
  CoordinateHint hint = [](const HVector& h) {
    std::vector<ChartPoint> out;
    const double theta = std::atan2(h[1], h[0]);
    const double z = std::clamp(h[2], -10.0, 10.0);
    for (int k = -1; k <= 1; ++k) out.push_back(at({theta + 2.0 * std::numbers::pi * k, z}));
    return out;
  };
  CoordinateBox box{vec({-10.0, -10.0}), vec({10.0, 10.0})};
  Manifold manifold(space, {ManifoldChart(box, map, jac)}, 3, true, hint);

  // Rotation about the axis keeps the cylinder invariant.
  Eigen::MatrixXd rotation = Eigen::MatrixXd::Zero(3, 3);
  rotation(0, 1) = -1.0;
  rotation(1, 0) = 1.0;
  const HVector axis(space, vec({0.0, 0.0, 1.0}));
  LevyDriver driver(1, {JumpMeasureSpec::uniform(4.0, 0.0, 0.2)});
  Coefficients coeffs;
  coeffs.alpha = constant_field(0.1 * axis);
  coeffs.sigma.push_back(constant_field(0.5 * axis));
  coeffs.gamma.push_back(constant_field(axis));
  coeffs.lipschitz_hint = 0.0;
  coeffs.sigma_declared_c1 = true;
  SPDEProblem problem(space, Semigroup::matrix_generator(space, rotation), std::move(coeffs), std::move(driver));
  const HVector cols[] = {axis};
  return ModelInstance{
      .name = "fixture:cylinder",
      .description = "unit cylinder in R^3 rotated about its axis, jumps along the axis",
      .problem = std::move(problem),
      .manifold = std::move(manifold),
      .analytic_l = orthonormalize(cols),
      .samples = grid_plan(linspace(-3.0, 3.0, 10), linspace(-1.0, 1.0, 5)),
      .path_starts = {at({0.0, 0.0}), at({1.0, 0.5})},
      .shift_extent = 2.0,
      .jump_grids = {linspace(0.0, 0.2, 20)},
      .eps_min = 1e-3,
      .expected = ExpectedVerdicts{.invariant = true, .flatness = 1, .classification = Classification::Foliation},
      .parameters = {},
      .chain = grid_plan(linspace(0.0, 1.05, 8), {0.0}),
  };
}

ModelInstance sine_noninvariant_fixture() {
  ModelInstance m = sine_instance("fixture:sine-noninvariant",
                                  "sine graph with uniform jumps on [0, 0.5]: sub-period shifts leave the graph", 8.0,
                                  JumpMeasureSpec::uniform(2.0, 0.0, 0.5));
  m.jump_grids = {linspace(0.0, 0.5, 20)};
  m.chain = line_plan(linspace(0.0, 1.05, 8));
  m.expected = ExpectedVerdicts{.invariant = false,
                                .flatness = 0,
                                .classification = std::nullopt,
                                .jump_closure_pass = false,
                                .path_invariance_pass = false,
                                .flatness_bound_pass = false,
                                .decompose_pass = false};
  return m;
}

}  // namespace

std::vector<ModelInstance> build_fixtures() {
  std::vector<ModelInstance> out;
  out.push_back(affine_fixture());
  out.push_back(cylinder_fixture());
  out.push_back(sine_noninvariant_fixture());
  return out;
}

ModelInstance build_fixture(const std::string& name) {
  const std::string key = name.rfind("fixture:", 0) == 0 ? name.substr(8) : name;
  if (key == "affine-2d") return affine_fixture();
  if (key == "cylinder") return cylinder_fixture();
  if (key == "sine-noninvariant") return sine_noninvariant_fixture();
  throw ConfigError("unknown fixture '" + name + "'");
}

std::vector<std::string> model_names() {
  return {"hjmm-vasicek", "sine-counterexample", "fixture:affine-2d", "fixture:cylinder",
          "fixture:sine-noninvariant"};
}

}  // namespace levyflat
