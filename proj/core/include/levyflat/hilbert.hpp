#pragma once

// Discretized Hilbert space: a grid with positive quadrature weights and
// grid functions living on it. The inner product is the weighted sum
// <u, v> = sum_i w_i u_i v_i.

#include <Eigen/Dense>

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace levyflat {

class GridSpace;
using SpacePtr = std::shared_ptr<const GridSpace>;

class GridSpace {
 public:
  /// Throws ConfigError unless the grid is strictly increasing, every
  /// weight is positive and finite, and there are at least two nodes.
  GridSpace(std::vector<double> points, std::vector<double> weights, std::string label);

  /// Unit-weight space R^n with nodes 0, 1, ..., n-1.
  static SpacePtr euclidean(int n, std::string label = "R^n");
  /// Equispaced nodes on [a, b] with composite trapezoid weights.
  static SpacePtr uniform(double a, double b, int n, std::string label = "uniform");
  /// Chebyshev-Lobatto nodes on [a, b] (clustered at both ends) with
  /// trapezoid weights.
  static SpacePtr chebyshev(double a, double b, int n, std::string label = "chebyshev");
  /// Arbitrary nodes with trapezoid weights.
  static SpacePtr trapezoid(std::vector<double> points, std::string label);

  int dim() const { return static_cast<int>(points_.size()); }
  const Eigen::VectorXd& points() const { return points_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& sqrt_weights() const { return sqrt_weights_; }
  const std::string& label() const { return label_; }

  bool same_geometry(const GridSpace& other) const;

 private:
  Eigen::VectorXd points_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd sqrt_weights_;
  std::string label_;
};

/// Throws StructuralError when a and b are not the same space (by identity
/// or by identical nodes and weights).
void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* context);

/// Grid function tied to a GridSpace. Entries are always finite.
class HVector {
 public:
  HVector(SpacePtr space, Eigen::VectorXd coeffs);
  HVector(SpacePtr space, std::span<const double> values);

  static HVector zero(SpacePtr space);
  /// Samples f at the grid nodes.
  template <class F>
  static HVector sample(SpacePtr space, F&& f) {
    Eigen::VectorXd v(space->dim());
    for (int i = 0; i < space->dim(); ++i) v[i] = f(space->points()[i]);
    return HVector(std::move(space), std::move(v));
  }

  const SpacePtr& space() const { return space_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  int size() const { return static_cast<int>(coeffs_.size()); }
  double operator[](int i) const { return coeffs_[i]; }

  /// Coefficients in the W^{1/2}-scaled Euclidean frame.
  Eigen::VectorXd euclidean() const;

  HVector& operator+=(const HVector& other);
  HVector& operator-=(const HVector& other);
  HVector& operator*=(double s);

  friend HVector operator+(HVector a, const HVector& b) { return a += b; }
  friend HVector operator-(HVector a, const HVector& b) { return a -= b; }
  friend HVector operator*(double s, HVector a) { return a *= s; }
  friend HVector operator*(HVector a, double s) { return a *= s; }

 private:
  void check_finite(const char* context) const;

  SpacePtr space_;
  Eigen::VectorXd coeffs_;
};

double inner(const HVector& u, const HVector& v);
double norm(const HVector& v);

}  // namespace levyflat
