#pragma once

// Numerical verdicts: tangency of the small-jump volatilities, closure of M
// under jumps, Monte Carlo path invariance and the flatness lower bound.

#include "levyflat/flatness.hpp"
#include "levyflat/manifold.hpp"
#include "levyflat/spde.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace levyflat {

inline constexpr double kTangencyThreshold = 1e-8;
inline constexpr double kJumpClosureThreshold = 1e-6;
inline constexpr double kPathInvarianceThreshold = 1e-2;
inline constexpr double kHalvingRatioCutoff = 1.3;

enum class Verdict { Pass, Fail, Skip };
const char* to_string(Verdict v);

struct SampleRecord {
  std::size_t index = 0;
  double residual = 0.0;
  std::string note;
};

struct TestReport {
  std::string name;
  int samples = 0;
  double max_residual = 0.0;
  double threshold = 0.0;
  /// max_residual < threshold.
  bool pass = false;
  Verdict verdict = Verdict::Fail;
  std::string label;
  std::vector<SampleRecord> details;
  std::map<std::string, double> metrics;
  /// Optional (x, y) series, e.g. distance to M against time.
  std::vector<std::pair<double, double>> trace;
};

/// Residual per (h, k): |(I - P_T) gamma^k(h)| / |gamma^k(h)|, zero for gamma = 0.
TestReport tangency_test(const Manifold& m, const SPDEProblem& problem, const std::vector<int>& indices,
                         std::span<const ChartPoint> plan, double threshold = kTangencyThreshold);

/// Residual per (h, x): distance from h + x gamma^k(h) to M.
TestReport jump_closure_test(const Manifold& m, const SPDEProblem& problem, int k, const std::vector<double>& x_grid,
                             std::span<const ChartPoint> plan, double threshold = kJumpClosureThreshold,
                             const GaussNewtonOptions& gn = {});

struct PathInvarianceOptions {
  int n_paths = 100;
  double horizon = 1.0;
  double dt = 1e-3;
  double threshold = kPathInvarianceThreshold;
  std::uint64_t seed = 0;
  double ratio_cutoff = kHalvingRatioCutoff;
  /// Also run at dt/2 with the same noise and report the residual ratio.
  bool halving = true;
  GaussNewtonOptions gauss_newton{};
};

/// Path i starts at starts[i % size] with noise derive_seed(seed, i), drawn
/// at dt/2 and coarsened for dt. Residual is the largest distance to M over
/// all stored states; failed projections count as +inf.
/// The first kept->size() paths of the dt run are copied out when `kept` is
/// non-null and pre-sized.
TestReport path_invariance_test(const Manifold& m, const SPDEProblem& problem, std::span<const ChartPoint> starts,
                                const PathInvarianceOptions& options = {}, std::vector<MildPath>* kept = nullptr);

/// Skip when `indices` is empty. Otherwise, per base point, d is the dimension
/// of the intersection of span{gamma^k(h) : k in indices} over the sampling
/// neighbourhood and the residual is max(0, d - flatness). The global variant
/// intersects over every sample of every base point. Threshold 0.5 (integers).
TestReport flatness_bound_check(const Manifold& m, const SPDEProblem& problem, const std::vector<int>& indices,
                                std::span<const ChartPoint> plan, const FlatnessOptions& options = {});

}  // namespace levyflat
