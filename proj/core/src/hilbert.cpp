#include "levyflat/hilbert.hpp"

#include "levyflat/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace levyflat {

namespace {

std::vector<double> trapezoid_weights(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> w(n, 0.0);
  if (n < 2) return w;
  w.front() = 0.5 * (x[1] - x[0]);
  w.back() = 0.5 * (x[n - 1] - x[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) w[i] = 0.5 * (x[i + 1] - x[i - 1]);
  return w;
}

}  // namespace

GridSpace::GridSpace(std::vector<double> points, std::vector<double> weights, std::string label)
    : label_(std::move(label)) {
  if (points.size() < 2) {
    throw ConfigError("GridSpace '" + label_ + "': need at least 2 nodes");
  }
  if (points.size() != weights.size()) {
    throw ConfigError("GridSpace '" + label_ + "': nodes and weights differ in length");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i]) || !std::isfinite(weights[i])) {
      throw ConfigError("GridSpace '" + label_ + "': non-finite node or weight");
    }
    if (!(weights[i] > 0.0)) {
      std::ostringstream os;
      os << "GridSpace '" << label_ << "': weight " << i << " is not positive";
      throw ConfigError(os.str());
    }
    if (i > 0 && !(points[i] > points[i - 1])) {
      throw ConfigError("GridSpace '" + label_ + "': nodes must be strictly increasing");
    }
  }
  points_ = Eigen::Map<const Eigen::VectorXd>(points.data(), static_cast<Eigen::Index>(points.size()));
  weights_ = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  sqrt_weights_ = weights_.cwiseSqrt();
}

SpacePtr GridSpace::euclidean(int n, std::string label) {
  if (n < 2) throw ConfigError("euclidean space needs n >= 2");
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = i;
  return std::make_shared<const GridSpace>(std::move(x), std::vector<double>(static_cast<std::size_t>(n), 1.0),
                                           std::move(label));
}

SpacePtr GridSpace::uniform(double a, double b, int n, std::string label) {
  if (n < 2 || !(b > a)) throw ConfigError("uniform grid needs n >= 2 and b > a");
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  x.back() = b;
  return trapezoid(std::move(x), std::move(label));
}

SpacePtr GridSpace::chebyshev(double a, double b, int n, std::string label) {
  if (n < 2 || !(b > a)) throw ConfigError("chebyshev grid needs n >= 2 and b > a");
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double c = -std::cos(std::numbers::pi * i / (n - 1));
    x[static_cast<std::size_t>(i)] = 0.5 * (a + b) + 0.5 * (b - a) * c;
  }
  x.front() = a;
  x.back() = b;
  return trapezoid(std::move(x), std::move(label));
}

SpacePtr GridSpace::trapezoid(std::vector<double> points, std::string label) {
  auto w = trapezoid_weights(points);
  return std::make_shared<const GridSpace>(std::move(points), std::move(w), std::move(label));
}

bool GridSpace::same_geometry(const GridSpace& other) const {
  return points_.size() == other.points_.size() && points_ == other.points_ && weights_ == other.weights_;
}

void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* context) {
  if (a == b) return;
  if (!a || !b || !a->same_geometry(*b)) {
    throw StructuralError(std::string(context) + ": vectors live on different grid spaces");
  }
}

HVector::HVector(SpacePtr space, Eigen::VectorXd coeffs) : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (!space_) throw StructuralError("HVector: null space");
  if (coeffs_.size() != space_->dim()) {
    std::ostringstream os;
    os << "HVector: length " << coeffs_.size() << " does not match space dimension " << space_->dim();
    throw StructuralError(os.str());
  }
  check_finite("HVector");
}

HVector::HVector(SpacePtr space, std::span<const double> values)
    : HVector(std::move(space),
              Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())))) {}

HVector HVector::zero(SpacePtr space) {
  const int n = space->dim();
  return HVector(std::move(space), Eigen::VectorXd::Zero(n));
}

Eigen::VectorXd HVector::euclidean() const { return space_->sqrt_weights().cwiseProduct(coeffs_); }

void HVector::check_finite(const char* context) const {
  if (!coeffs_.allFinite()) throw NumericError(std::string(context) + ": non-finite entry");
}

HVector& HVector::operator+=(const HVector& other) {
  require_same_space(space_, other.space_, "HVector::operator+");
  coeffs_ += other.coeffs_;
  check_finite("HVector::operator+");
  return *this;
}

HVector& HVector::operator-=(const HVector& other) {
  require_same_space(space_, other.space_, "HVector::operator-");
  coeffs_ -= other.coeffs_;
  check_finite("HVector::operator-");
  return *this;
}

HVector& HVector::operator*=(double s) {
  coeffs_ *= s;
  check_finite("HVector::operator*");
  return *this;
}

double inner(const HVector& u, const HVector& v) {
  require_same_space(u.space(), v.space(), "inner");
  return (u.space()->weights().array() * u.coeffs().array() * v.coeffs().array()).sum();
}

double norm(const HVector& v) { return v.euclidean().norm(); }

}  // namespace levyflat
