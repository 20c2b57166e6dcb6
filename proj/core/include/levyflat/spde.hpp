#pragma once

// Semilinear SPDE  dr = (A r + alpha(r)) dt + sigma(r) dW + gamma(r-) dX
// on a GridSpace, simulated in mild form by exponential Euler with the jump
// times of the driver inserted exactly into the time grid.

#include "levyflat/hilbert.hpp"
#include "levyflat/levy.hpp"
#include "levyflat/semigroup.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace levyflat {

using VectorField = std::function<HVector(const HVector&)>;

struct Coefficients {
  /// Empty means identically zero.
  VectorField alpha;
  std::vector<VectorField> sigma;
  std::vector<VectorField> gamma;
  std::optional<double> lipschitz_hint;
  /// Recorded only; the simulator never differentiates sigma.
  bool sigma_declared_c1 = false;
};

/// Constant vector field h -> value.
VectorField constant_field(HVector value);

class SPDEProblem {
 public:
  /// Requires sigma.size() == driver.p(), gamma.size() == driver.q() and a
  /// semigroup on `space`.
  SPDEProblem(SpacePtr space, Semigroup semigroup, Coefficients coefficients, LevyDriver driver);

  const SpacePtr& space() const { return space_; }
  const Semigroup& semigroup() const { return semigroup_; }
  const Coefficients& coefficients() const { return coefficients_; }
  const LevyDriver& driver() const { return driver_; }

  HVector alpha(const HVector& h) const;
  HVector sigma(int j, const HVector& h) const;
  HVector gamma(int k, const HVector& h) const;

 private:
  SpacePtr space_;
  Semigroup semigroup_;
  Coefficients coefficients_;
  LevyDriver driver_;
};

/// sum_k x_k gamma^k(h).
HVector jump_coefficient(const SPDEProblem& problem, const HVector& h, const Eigen::VectorXd& x);

enum class StateFlag { Step, PreJump, PostJump };
const char* to_string(StateFlag flag);

struct PathState {
  double time = 0.0;
  StateFlag flag = StateFlag::Step;
  HVector value;
  int jump_coordinate = -1;
  double jump_size = 0.0;
};

struct MildPath {
  std::vector<PathState> states;
  const HVector& terminal() const { return states.back().value; }
};

MildPath simulate_mild(const SPDEProblem& problem, const HVector& h0, const DriverPath& noise);
MildPath simulate_mild(const SPDEProblem& problem, const HVector& h0, double horizon, double dt, std::uint64_t seed);

struct ConvergenceResult {
  std::vector<double> dts;
  /// Mean strong error |r_T^dt - r_T^ref| per dt.
  std::vector<double> errors;
  double slope = 0.0;
  double r_squared = 0.0;
  /// Set when every error is at rounding level; slope is then NaN.
  bool skipped = false;
};

/// Path i draws noise with derive_seed(seed, i) at reference_dt and coarsens it
/// for each dt, so jump times and Brownian paths are shared exactly. Every dt
/// must be an integer multiple of reference_dt.
ConvergenceResult convergence_order(const SPDEProblem& problem, const HVector& h0, double horizon,
                                    const std::vector<double>& dt_list, int n_paths, std::uint64_t seed,
                                    double reference_dt);

}  // namespace levyflat
