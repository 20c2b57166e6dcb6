#pragma once

// Finite-dimensional subspaces of a GridSpace and their algebra:
// orthonormalization, orthogonal projection, complements, intersections
// and principal angles. All factorizations are carried out in the
// W^{1/2}-scaled frame, where the weighted inner product is Euclidean.

#include "levyflat/hilbert.hpp"

#include <span>
#include <vector>

namespace levyflat {

inline constexpr double kDefaultRankTol = 1e-10;

class Subspace {
 public:
  static Subspace zero(SpacePtr space, double tol = kDefaultRankTol);
  static Subspace whole(SpacePtr space, double tol = kDefaultRankTol);
  /// Wraps columns that are already orthonormal in the scaled frame.
  /// Throws NumericError if Q^T Q deviates from the identity by more than 10*tol.
  static Subspace from_euclidean_orthonormal(SpacePtr space, Eigen::MatrixXd q, double tol = kDefaultRankTol);

  const SpacePtr& space() const { return space_; }
  int dim() const { return static_cast<int>(q_.cols()); }
  int ambient_dim() const { return static_cast<int>(q_.rows()); }
  double tol() const { return tol_; }

  /// n x d basis with B^T W B = I.
  Eigen::MatrixXd basis() const;
  /// n x d basis orthonormal in the scaled frame (W^{1/2} B).
  const Eigen::MatrixXd& euclidean_basis() const { return q_; }
  HVector basis_vector(int j) const;

 private:
  Subspace(SpacePtr space, Eigen::MatrixXd q, double tol);

  SpacePtr space_;
  Eigen::MatrixXd q_;
  double tol_;
};

/// Span of `vectors`; rank is the count of singular values above tol * sigma_max.
/// An all-zero input yields the zero subspace.
Subspace orthonormalize(std::span<const HVector> vectors, double tol = kDefaultRankTol);

HVector project(const HVector& v, const Subspace& s);

Subspace complement(const Subspace& s);

/// Common subspace of all inputs. Pairwise left fold; a direction of the
/// running intersection survives a step when its principal-angle sine to the
/// next space is at most tol. The result is re-checked against every input.
Subspace intersect(std::span<const Subspace> spaces, double tol = kDefaultRankTol);
Subspace intersect(const Subspace& a, const Subspace& b, double tol = kDefaultRankTol);

/// Principal angles in ascending order, min(dim a, dim b) of them. Small
/// angles come from sines and large ones from cosines so both ends are
/// accurate.
std::vector<double> principal_angles(const Subspace& a, const Subspace& b);

/// Largest principal angle, or 0 when either space is trivial.
double max_principal_angle(const Subspace& a, const Subspace& b);

}  // namespace levyflat
