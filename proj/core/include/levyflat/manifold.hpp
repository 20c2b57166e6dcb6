#pragma once

// Finite-dimensional submanifolds of a GridSpace given by explicit
// parametrizations (charts), their tangent spaces and the Gauss-Newton
// projection of ambient points onto them.

#include "levyflat/errors.hpp"
#include "levyflat/hilbert.hpp"
#include "levyflat/subspace.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace levyflat {

/// Closed axis-aligned box in R^m.
struct CoordinateBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Eigen::VectorXd& y) const;
};

using ChartMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using ChartJacobian = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

class ManifoldChart {
 public:
  /// `map` returns grid coefficients. Without an analytic `jacobian` the
  /// chart falls back to central differences with step `fd_step`.
  ManifoldChart(CoordinateBox domain, ChartMap map, ChartJacobian jacobian = {}, double fd_step = 1e-6);

  const CoordinateBox& domain() const { return domain_; }
  int dim() const { return domain_.dim(); }
  bool has_analytic_jacobian() const { return static_cast<bool>(jacobian_); }
  double fd_step() const { return fd_step_; }

  Eigen::VectorXd map(const Eigen::VectorXd& y) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& y) const;
  /// Central differences; falls back to one-sided steps at the box faces.
  Eigen::MatrixXd fd_jacobian(const Eigen::VectorXd& y) const;

 private:
  CoordinateBox domain_;
  ChartMap map_;
  ChartJacobian jacobian_;
  double fd_step_;
};

/// Chart index plus coordinates inside that chart's domain.
struct ChartPoint {
  std::size_t chart = 0;
  Eigen::VectorXd coords;
};

/// Optional model-supplied starting guesses for projecting `h` onto M.
using CoordinateHint = std::function<std::vector<ChartPoint>(const HVector&)>;

class Manifold {
 public:
  /// All charts must share the coordinate dimension m <= n. `declared_closed`
  /// records that M is closed in H; this cannot be checked numerically.
  Manifold(SpacePtr ambient, std::vector<ManifoldChart> charts, int smoothness_class = 3,
           bool declared_closed = true, CoordinateHint hint = {});

  const SpacePtr& ambient() const { return ambient_; }
  int dim() const { return dim_; }
  int smoothness_class() const { return smoothness_class_; }
  bool declared_closed() const { return declared_closed_; }
  const std::vector<ManifoldChart>& charts() const { return charts_; }
  const ManifoldChart& chart(std::size_t i) const;

  HVector point(const ChartPoint& p) const;
  /// Dphi at p in grid coefficients (n x m).
  Eigen::MatrixXd jacobian(const ChartPoint& p) const;
  std::vector<ChartPoint> coordinate_hints(const HVector& h) const;

 private:
  SpacePtr ambient_;
  std::vector<ManifoldChart> charts_;
  int dim_;
  int smoothness_class_;
  bool declared_closed_;
  CoordinateHint hint_;
};

/// Orthonormalized range of Dphi. Throws DegenerateChartError when the
/// Jacobian has rank < m (smallest singular value <= tol * largest).
Subspace tangent_at(const Manifold& m, const ChartPoint& p, double tol = kDefaultRankTol);

struct GaussNewtonOptions {
  int max_iterations = 100;
  /// Stop when |Dphi^T W (phi - h)| < gradient_tol * (1 + |h|).
  double gradient_tol = 1e-10;
  int max_halvings = 60;
};

struct ClosestPoint {
  ChartPoint coords;
  HVector point;
  double distance;
  int iterations;
};

class NoConvergenceError : public NumericError {
 public:
  NoConvergenceError(const std::string& what, ChartPoint last, double distance)
      : NumericError(what), last_(std::move(last)), distance_(distance) {}
  const ChartPoint& last_iterate() const { return last_; }
  double distance() const { return distance_; }

 private:
  ChartPoint last_;
  double distance_;
};

class DomainExitError : public NumericError {
 public:
  DomainExitError(const std::string& what, ChartPoint last)
      : NumericError(what), last_(std::move(last)) {}
  const ChartPoint& last_iterate() const { return last_; }

 private:
  ChartPoint last_;
};

/// Damped Gauss-Newton minimization of |phi(y) - h| inside the chart of y0.
ClosestPoint closest_point(const Manifold& m, const HVector& h, const ChartPoint& y0,
                           const GaussNewtonOptions& options = {});

/// Runs closest_point from every guess and every model hint, returning the
/// smallest distance found. Rethrows the last failure when all starts fail.
ClosestPoint nearest_point(const Manifold& m, const HVector& h, std::span<const ChartPoint> guesses,
                           const GaussNewtonOptions& options = {});

/// Relative Frobenius distance between analytic and finite-difference
/// Jacobians at p. Zero when the chart has no analytic Jacobian.
double jacobian_check(const Manifold& m, const ChartPoint& p);

}  // namespace levyflat
