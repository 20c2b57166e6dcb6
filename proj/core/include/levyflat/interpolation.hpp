#pragma once

#include <Eigen/Dense>

namespace levyflat {

/// Piecewise cubic Hermite interpolant with fourth-order node slopes
/// (five-point Lagrange differentiation) and the Fritsch-Carlson limiter.
/// Constant extrapolation on both sides.
class MonotoneCubic {
 public:
  /// With `flat_right_end` the last slope is zero, so the interpolant joins
  /// its right extrapolation with a continuous derivative.
  MonotoneCubic(Eigen::VectorXd x, Eigen::VectorXd y, bool flat_right_end = false);

  double operator()(double t) const;
  double derivative(double t) const;
  /// Exact integral of the interpolant (with its extrapolation) over [a, b].
  double integral(double a, double b) const;

  const Eigen::VectorXd& nodes() const { return x_; }
  const Eigen::VectorXd& values() const { return y_; }
  const Eigen::VectorXd& slopes() const { return m_; }

 private:
  Eigen::Index locate(double t) const;
  /// Integral from x_0 to t.
  double antiderivative(double t) const;

  Eigen::VectorXd x_;
  Eigen::VectorXd y_;
  Eigen::VectorXd m_;
  Eigen::VectorXd cumulative_;
};

/// Weights d_j with f'(x[i]) ~ sum_j d_j f(x[first + j]) over `count` nodes.
Eigen::VectorXd lagrange_derivative_weights(const Eigen::VectorXd& x, Eigen::Index first, Eigen::Index count,
                                            Eigen::Index i);

}  // namespace levyflat
