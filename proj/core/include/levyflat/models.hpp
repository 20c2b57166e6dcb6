#pragma once

// Built-in model instances: the Vasicek / Hull-White HJMM forward-rate model
// with its two-dimensional invariant foliation, the sine-graph counterexample
// and small affine / cylinder / non-invariant fixtures.

#include "levyflat/flatness.hpp"
#include "levyflat/levy.hpp"
#include "levyflat/manifold.hpp"
#include "levyflat/spde.hpp"

#include <optional>
#include <string>
#include <vector>

namespace levyflat {

struct VasicekParams {
  /// Volatility scale, nonzero.
  double rho = 0.05;
  /// Mean reversion speed.
  double c = 0.3;
  double lambda = 5.0;
  Interval support{0.0, 0.02};
  double xi_max = 10.0;
  int n = 64;
  /// Nelson-Siegel initial curve.
  double ns_level = 0.04;
  double ns_slope = -0.02;
  double ns_curvature = 0.005;
  double ns_tau = 2.5;
  /// Chart box: t in [t_min, t_max], z in [-z_bound, z_bound].
  double t_min = -0.5;
  double t_max = 3.0;
  double z_bound = 5.0;
  /// Switches for the two parts of X = W + jumps.
  bool wiener = true;
  bool jumps = true;
};

/// X = W + compensated jumps (either part may be switched off).
LevyDriver vasicek_driver(const VasicekParams& params);

/// gamma(xi) = rho e^{-c xi}.
double vasicek_volatility(const VasicekParams& params, double xi);
/// int_0^xi gamma, closed form.
double vasicek_integrated_volatility(const VasicekParams& params, double xi);
/// alpha(xi) = -gamma(xi) Psi'(-Gamma(xi)).
double hjm_drift_at(const VasicekParams& params, const LevyDriver& driver, double xi);
HVector hjm_drift(const VasicekParams& params, const LevyDriver& driver, const SpacePtr& space);
/// Nelson-Siegel curve of the params.
double nelson_siegel(const VasicekParams& params, double xi);

struct ExpectedVerdicts {
  bool invariant = true;
  std::optional<int> flatness;
  std::optional<Classification> classification;
  bool jump_closure_pass = true;
  bool path_invariance_pass = true;
  bool flatness_bound_pass = true;
  bool decompose_pass = true;
};

struct ModelInstance {
  std::string name;
  std::string description;
  SPDEProblem problem;
  Manifold manifold;
  /// L known in closed form, when there is one.
  std::optional<Subspace> analytic_l;
  std::vector<ChartPoint> samples;
  std::vector<ChartPoint> path_starts;
  /// Largest shift norm used by decompose.
  double shift_extent = 1.0;
  /// Jump sizes per jump coordinate used by the closure test.
  std::vector<std::vector<double>> jump_grids;
  double eps_min = 1e-3;
  ExpectedVerdicts expected;
  /// Parameters echoed into reports.
  std::vector<std::pair<std::string, double>> parameters;
  /// Base points spaced closer than two flatness radii, for chain_consistency.
  std::vector<ChartPoint> chain;
};

ModelInstance build_hjmm_vasicek(const VasicekParams& params = {});

struct SineParams {
  double lambda = 1.0;
  /// Chart box [-half_width, half_width].
  double half_width = 8.0;
};

/// H = R^2, M = graph of sin(2 pi xi), gamma = (1, 0), Poisson jumps of size 1.
ModelInstance build_sine_counterexample(const SineParams& params = {});

/// affine-2d, cylinder, sine-noninvariant.
std::vector<ModelInstance> build_fixtures();
ModelInstance build_fixture(const std::string& name);

/// Model by selector: "hjmm-vasicek", "sine-counterexample" or "fixture:<name>".
std::vector<std::string> model_names();

/// Evenly spread points of a closed interval, endpoints included.
std::vector<double> linspace(double a, double b, int count);

}  // namespace levyflat
