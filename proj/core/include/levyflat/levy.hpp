#pragma once

// Driving noise: a p-dimensional Wiener process plus q independent
// compensated compound Poisson processes with compactly supported jump laws.

#include "levyflat/errors.hpp"
#include "levyflat/random.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace levyflat {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

struct Atom {
  double location = 0.0;
  /// Probability of this jump size; masses sum to one.
  double mass = 0.0;
};

/// Levy measure F = intensity * law, where law is a probability density on a
/// finite union of intervals or a finite set of atoms.
class JumpMeasureSpec {
 public:
  enum class Kind { Uniform, Density, Atoms };

  static JumpMeasureSpec uniform(double intensity, double lower, double upper);
  static JumpMeasureSpec atoms(double intensity, std::vector<Atom> atoms);
  /// `pdf` must integrate to 1 over `support` (checked to 1e-6) and is
  /// spot-checked for positivity at 100 points.
  static JumpMeasureSpec density(double intensity, std::function<double(double)> pdf, std::vector<Interval> support,
                                 std::string label = "density");

  Kind kind() const { return kind_; }
  double intensity() const { return intensity_; }
  /// Declared support intervals, merged and sorted. Empty for atoms.
  const std::vector<Interval>& support() const { return support_; }
  const std::vector<Atom>& atom_list() const { return atoms_; }
  const std::string& label() const { return label_; }

  /// Probability density of the jump law (0 for atoms).
  double pdf(double x) const;
  /// Integral of f against F, i.e. intensity * E[f(jump)].
  /// Densities are integrated by adaptive Gauss-Kronrod, split at `breaks`.
  double integrate(const std::function<double(double)>& f, const std::vector<double>& breaks = {}) const;
  /// E[jump] under the probability law.
  double mean_jump() const;
  /// Closed interval containing every jump size.
  Interval hull() const;
  double sample(Engine& engine) const;
  std::string describe() const;

 private:
  JumpMeasureSpec() = default;
  void build_inverse_cdf();

  Kind kind_ = Kind::Uniform;
  double intensity_ = 0.0;
  std::vector<Interval> support_;
  std::vector<Atom> atoms_;
  std::function<double(double)> pdf_;
  std::string label_;
  double mean_ = 0.0;
  // Tabulated inverse CDF for general densities.
  std::vector<double> cdf_x_;
  std::vector<double> cdf_p_;
};

class LevyDriver {
 public:
  /// `wiener_in_x` marks the scalar driver X = W + jumps used by the cumulant.
  LevyDriver(int wiener_dim, std::vector<JumpMeasureSpec> jumps, bool wiener_in_x = false);

  int p() const { return p_; }
  int q() const { return static_cast<int>(jumps_.size()); }
  bool wiener_in_x() const { return wiener_in_x_; }
  const std::vector<JumpMeasureSpec>& jumps() const { return jumps_; }
  const JumpMeasureSpec& jump(int k) const;
  /// Drift per unit time that compensates coordinate k: -intensity * E[jump].
  double compensator_rate(int k) const;

 private:
  int p_;
  std::vector<JumpMeasureSpec> jumps_;
  bool wiener_in_x_;
};

/// Zero-based indices k whose support contains [0, eps] or [-eps, 0] for some
/// eps >= eps_min. Atoms never qualify.
std::vector<int> small_jump_indices(const LevyDriver& driver, double eps_min);

/// Integral of max(|x|^2, |x|^4) against F.
double moment_check(const JumpMeasureSpec& spec);

/// Psi(z) = z^2/2 [Wiener in X] + int (e^{zx} - 1 - zx) F(dx).
/// Defined for a scalar driver: q = 1, or q = 0 with the Wiener part in X.
double cumulant(const LevyDriver& driver, double z);
/// Psi'(z) = z [Wiener in X] + int x (e^{zx} - 1) F(dx).
double cumulant_prime(const LevyDriver& driver, double z);

struct JumpEvent {
  double time = 0.0;
  int coordinate = 0;
  double size = 0.0;
  /// W at the jump time (length p), drawn from the Brownian bridge between
  /// the neighbouring grid values.
  Eigen::VectorXd wiener;
};

struct DriverPath {
  double horizon = 0.0;
  /// 0 = t_0 < ... < t_M = horizon.
  std::vector<double> time_grid;
  /// M x p increments of W over the grid steps.
  Eigen::MatrixXd wiener_increments;
  /// All jumps, sorted by time then coordinate.
  std::vector<JumpEvent> events;
  /// Per jump coordinate: -intensity * E[jump].
  std::vector<double> compensator_drift;

  int p() const { return static_cast<int>(wiener_increments.cols()); }
  int q() const { return static_cast<int>(compensator_drift.size()); }
  int steps() const { return static_cast<int>(time_grid.size()) - 1; }
  /// W at grid node i.
  Eigen::VectorXd wiener_at(int i) const;
  std::vector<JumpEvent> events_for(int k) const;
  /// Compensated jump coordinate X^k at time t.
  double jump_value(int k, double t) const;
  /// Same noise on every factor-th grid node (plus the horizon).
  DriverPath coarsen(int factor) const;
};

/// Regular grid 0, dt, 2dt, ... ending exactly at horizon.
std::vector<double> regular_grid(double horizon, double dt);

/// Exact compound Poisson simulation plus Gaussian increments.
/// Streams: Wiener coordinate j uses make_engine(seed, j), jump coordinate k
/// uses make_engine(seed, 1000 + k), bridge draws use make_engine(seed, 2000).
DriverPath sample_path(const LevyDriver& driver, double horizon, double dt, std::uint64_t seed);

}  // namespace levyflat
