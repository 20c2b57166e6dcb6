#pragma once

// Flatness of a manifold: the dimension of the largest linear subspace
// contained in every tangent space near a base point, estimated from
// finitely many sampled tangent spaces. Also the direct-sum decomposition
// M = N (+) L and the affine / foliation classification.

#include "levyflat/manifold.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace levyflat {

inline constexpr double kDefaultFlatnessTol = 1e-8;

struct FlatnessOptions {
  double radius = 0.1;
  int n_samples = 32;
  /// Sine threshold of the tangent-space intersection.
  double tol = kDefaultFlatnessTol;
  std::uint64_t seed = 0;
};

struct FlatnessReport {
  HVector base_point;
  ChartPoint base_coords;
  int flatness = 0;
  Subspace common_subspace;
  int samples_used = 0;
  double radius = 0.0;
  double tol = 0.0;
  std::uint64_t seed = 0;
  /// Singular values (descending) of the stacked out-of-tangent components
  /// of the base tangent basis, scaled by 1/sqrt(samples). Values at or
  /// below tol belong to the common subspace.
  std::vector<double> spectrum;
  /// Smallest spectrum value above tol minus the largest at or below it
  /// (missing sides count as 1 and 0).
  double singular_value_gap = 0.0;
};

/// Coordinates drawn uniformly from the ball of `radius` around `center`,
/// restricted to the chart box by rejection. Deterministic in `seed`.
std::vector<ChartPoint> sample_coordinate_ball(const Manifold& m, const ChartPoint& center, double radius, int count,
                                               std::uint64_t seed);

FlatnessReport flatness_at(const Manifold& m, const ChartPoint& base, const FlatnessOptions& options = {});

struct GlobalFlatness {
  int flatness = 0;
  std::vector<FlatnessReport> per_point;
};

/// Minimum of flatness_at over the plan. Point i uses seed derive_seed(seed, i).
GlobalFlatness flatness_global(const Manifold& m, std::span<const ChartPoint> plan, const FlatnessOptions& options = {});

struct ChainCheck {
  bool consistent = true;
  /// Max principal angle per listed pair; +inf when dimensions differ.
  std::vector<double> angles;
};

/// Whether the common subspaces of overlapping neighborhoods agree, the
/// numerical witness for a single global L along a chain of base points.
ChainCheck chain_consistency(std::span<const FlatnessReport> reports,
                             std::span<const std::pair<std::size_t, std::size_t>> overlap_pairs, double angle_tol);

/// Consecutive report pairs whose sampling balls overlap (same chart,
/// coordinate distance < 2 * radius).
std::vector<std::pair<std::size_t, std::size_t>> overlapping_pairs(std::span<const FlatnessReport> reports);

struct DecomposeOptions {
  /// Largest |g| of the shifts g in L.
  double shift_extent = 1.0;
  /// Shift magnitudes per direction, spread over [-extent, extent] without 0.
  int shifts_per_direction = 4;
  /// Max principal angle of L into a tangent space counted as tangent.
  double tangency_tol = 1e-8;
  GaussNewtonOptions gauss_newton{};
};

struct DecompositionSample {
  ChartPoint coords;
  HVector normal_part;
  double tangency_angle = 0.0;
  double max_shift_residual = 0.0;
  std::string failure;
};

struct Decomposition {
  std::vector<HVector> n_points;
  double max_residual = 0.0;
  double max_tangency_angle = 0.0;
  bool tangency_ok = true;
  std::vector<DecompositionSample> samples;
};

/// N_points are the L-perp parts of the sampled manifold points; max_residual
/// is the largest distance from h + g to M over samples h and shifts g in L.
Decomposition decompose(const Manifold& m, const Subspace& l, std::span<const ChartPoint> plan,
                        const DecomposeOptions& options = {});

enum class Classification { AffineSpace, Foliation, General };

Classification classify(int manifold_dim, int flatness);
std::string_view to_string(Classification c);

}  // namespace levyflat
