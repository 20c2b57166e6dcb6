#include "levyflat/subspace.hpp"

#include "levyflat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace levyflat {

Subspace::Subspace(SpacePtr space, Eigen::MatrixXd q, double tol)
    : space_(std::move(space)), q_(std::move(q)), tol_(tol) {}

Subspace Subspace::zero(SpacePtr space, double tol) {
  const int n = space->dim();
  return Subspace(std::move(space), Eigen::MatrixXd(n, 0), tol);
}

Subspace Subspace::whole(SpacePtr space, double tol) {
  const int n = space->dim();
  return Subspace(std::move(space), Eigen::MatrixXd::Identity(n, n), tol);
}

Subspace Subspace::from_euclidean_orthonormal(SpacePtr space, Eigen::MatrixXd q, double tol) {
  if (q.rows() != space->dim()) throw StructuralError("Subspace: basis rows do not match space dimension");
  if (q.cols() > q.rows()) throw StructuralError("Subspace: more basis vectors than ambient dimension");
  if (q.cols() > 0) {
    const double err = (q.transpose() * q - Eigen::MatrixXd::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
    if (err > 10.0 * tol) {
      std::ostringstream os;
      os << "Subspace: basis is not orthonormal (deviation " << err << ")";
      throw NumericError(os.str());
    }
  }
  return Subspace(std::move(space), std::move(q), tol);
}

Eigen::MatrixXd Subspace::basis() const {
  return space_->sqrt_weights().cwiseInverse().asDiagonal() * q_;
}

HVector Subspace::basis_vector(int j) const {
  return HVector(space_, Eigen::VectorXd(space_->sqrt_weights().cwiseInverse().cwiseProduct(q_.col(j))));
}

Subspace orthonormalize(std::span<const HVector> vectors, double tol) {
  if (vectors.empty()) throw StructuralError("orthonormalize: empty vector list");
  if (!(tol > 0.0)) throw ConfigError("orthonormalize: tol must be positive");
  const SpacePtr& space = vectors.front().space();
  const int n = space->dim();
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    require_same_space(space, vectors[j].space(), "orthonormalize");
    x.col(static_cast<Eigen::Index>(j)) = vectors[j].euclidean();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  int rank = 0;
  if (smax > 0.0) {
    while (rank < sv.size() && sv[rank] > tol * smax) ++rank;
  }
  return Subspace::from_euclidean_orthonormal(space, svd.matrixU().leftCols(rank), tol);
}

HVector project(const HVector& v, const Subspace& s) {
  require_same_space(v.space(), s.space(), "project");
  if (s.dim() == 0) return HVector::zero(v.space());
  const Eigen::MatrixXd& q = s.euclidean_basis();
  const Eigen::VectorXd pe = q * (q.transpose() * v.euclidean());
  return HVector(v.space(), Eigen::VectorXd(v.space()->sqrt_weights().cwiseInverse().cwiseProduct(pe)));
}

Subspace complement(const Subspace& s) {
  const int n = s.ambient_dim();
  const int d = s.dim();
  if (d == 0) return Subspace::whole(s.space(), s.tol());
  if (d == n) return Subspace::zero(s.space(), s.tol());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(s.euclidean_basis());
  const Eigen::MatrixXd full = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return Subspace::from_euclidean_orthonormal(s.space(), full.rightCols(n - d), s.tol());
}

Subspace intersect(const Subspace& a, const Subspace& b, double tol) {
  require_same_space(a.space(), b.space(), "intersect");
  if (a.dim() == 0 || b.dim() == 0) return Subspace::zero(a.space(), tol);
  const Eigen::MatrixXd& qa = a.euclidean_basis();
  const Eigen::MatrixXd& qb = b.euclidean_basis();
  // Column j of `residual` is the component of the j-th basis vector of a
  // that sticks out of b; its null space (in a's coordinates) is a ∩ b.
  const Eigen::MatrixXd residual = qa - qb * (qb.transpose() * qa);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const int da = a.dim();
  int kept = 0;
  // Singular values are sorted descending; count trailing ones at or below tol.
  for (int j = da - 1; j >= 0; --j) {
    const double s = j < sv.size() ? sv[j] : 0.0;
    if (s <= tol) {
      ++kept;
    } else {
      break;
    }
  }
  if (kept == 0) return Subspace::zero(a.space(), tol);
  Eigen::MatrixXd q = qa * svd.matrixV().rightCols(kept);
  // Re-orthonormalize against rounding drift.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
  Eigen::MatrixXd thin = qr.householderQ() * Eigen::MatrixXd::Identity(q.rows(), kept);
  return Subspace::from_euclidean_orthonormal(a.space(), std::move(thin), tol);
}

Subspace intersect(std::span<const Subspace> spaces, double tol) {
  if (spaces.empty()) throw StructuralError("intersect: empty subspace list");
  if (!(tol > 0.0)) throw ConfigError("intersect: tol must be positive");
  Subspace result = spaces.front();
  for (std::size_t j = 1; j < spaces.size() && result.dim() > 0; ++j) {
    result = intersect(result, spaces[j], tol);
  }
  if (spaces.size() == 1) {
    return Subspace::from_euclidean_orthonormal(result.space(), result.euclidean_basis(), tol);
  }
  for (const Subspace& s : spaces) {
    const double angle = max_principal_angle(result, s);
    if (angle >= 10.0 * tol) {
      std::ostringstream os;
      os << "intersect: result leaves an input subspace (angle " << angle << ")";
      throw NumericError(os.str());
    }
  }
  return result;
}

std::vector<double> principal_angles(const Subspace& a, const Subspace& b) {
  require_same_space(a.space(), b.space(), "principal_angles");
  const Subspace& small = a.dim() <= b.dim() ? a : b;
  const Subspace& large = a.dim() <= b.dim() ? b : a;
  const int d = small.dim();
  if (d == 0) return {};
  const Eigen::MatrixXd& q1 = small.euclidean_basis();
  const Eigen::MatrixXd& q2 = large.euclidean_basis();

  const Eigen::MatrixXd cross = q1.transpose() * q2;
  Eigen::JacobiSVD<Eigen::MatrixXd> cos_svd(cross);
  const Eigen::VectorXd cosines = cos_svd.singularValues();  // descending

  const Eigen::MatrixXd residual = q1 - q2 * cross.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> sin_svd(residual);
  Eigen::VectorXd sines = Eigen::VectorXd::Zero(d);
  const auto& sv = sin_svd.singularValues();
  for (int i = 0; i < std::min<int>(d, static_cast<int>(sv.size())); ++i) sines[i] = sv[i];
  std::sort(sines.data(), sines.data() + d);  // ascending

  std::vector<double> angles(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    const double s = std::min(1.0, sines[i]);
    const double c = std::min(1.0, i < cosines.size() ? cosines[i] : 0.0);
    angles[static_cast<std::size_t>(i)] = (s * s <= 0.5) ? std::asin(s) : std::acos(c);
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

double max_principal_angle(const Subspace& a, const Subspace& b) {
  const auto angles = principal_angles(a, b);
  return angles.empty() ? 0.0 : angles.back();
}

}  // namespace levyflat
