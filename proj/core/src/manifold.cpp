#include "levyflat/manifold.hpp"

#include <cmath>
#include <exception>
#include <sstream>

namespace levyflat {

bool CoordinateBox::contains(const Eigen::VectorXd& y) const {
  if (y.size() != lower.size()) return false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!(y[i] >= lower[i] && y[i] <= upper[i])) return false;
  }
  return true;
}

ManifoldChart::ManifoldChart(CoordinateBox domain, ChartMap map, ChartJacobian jacobian, double fd_step)
    : domain_(std::move(domain)), map_(std::move(map)), jacobian_(std::move(jacobian)), fd_step_(fd_step) {
  if (domain_.lower.size() != domain_.upper.size() || domain_.lower.size() == 0) {
    throw ConfigError("ManifoldChart: domain bounds must be non-empty and of equal length");
  }
  if (!((domain_.upper - domain_.lower).array() > 0.0).all()) {
    throw ConfigError("ManifoldChart: domain must have positive extent in every coordinate");
  }
  if (!map_) throw ConfigError("ManifoldChart: missing map");
  if (!(fd_step_ > 0.0)) throw ConfigError("ManifoldChart: fd_step must be positive");
}

Eigen::VectorXd ManifoldChart::map(const Eigen::VectorXd& y) const { return map_(y); }

Eigen::MatrixXd ManifoldChart::jacobian(const Eigen::VectorXd& y) const {
  return jacobian_ ? jacobian_(y) : fd_jacobian(y);
}

Eigen::MatrixXd ManifoldChart::fd_jacobian(const Eigen::VectorXd& y) const {
  const int m = dim();
  Eigen::MatrixXd jac;
  for (int j = 0; j < m; ++j) {
    const double h = fd_step_ * std::max(1.0, std::abs(y[j]));
    Eigen::VectorXd yp = y, ym = y;
    double span = 2.0 * h;
    yp[j] += h;
    ym[j] -= h;
    if (yp[j] > domain_.upper[j]) {
      yp[j] = y[j];
      span = h;
    } else if (ym[j] < domain_.lower[j]) {
      ym[j] = y[j];
      span = h;
    }
    const Eigen::VectorXd col = (map_(yp) - map_(ym)) / span;
    if (j == 0) jac.resize(col.size(), m);
    jac.col(j) = col;
  }
  return jac;
}

Manifold::Manifold(SpacePtr ambient, std::vector<ManifoldChart> charts, int smoothness_class, bool declared_closed,
                   CoordinateHint hint)
    : ambient_(std::move(ambient)),
      charts_(std::move(charts)),
      dim_(0),
      smoothness_class_(smoothness_class),
      declared_closed_(declared_closed),
      hint_(std::move(hint)) {
  if (!ambient_) throw ConfigError("Manifold: null ambient space");
  if (charts_.empty()) throw ConfigError("Manifold: at least one chart is required");
  if (smoothness_class_ < 1) throw ConfigError("Manifold: smoothness class must be >= 1");
  dim_ = charts_.front().dim();
  for (const auto& c : charts_) {
    if (c.dim() != dim_) throw ConfigError("Manifold: charts disagree on the manifold dimension");
  }
  if (dim_ > ambient_->dim()) throw ConfigError("Manifold: dimension exceeds ambient dimension");
}

const ManifoldChart& Manifold::chart(std::size_t i) const {
  if (i >= charts_.size()) throw StructuralError("Manifold: chart index out of range");
  return charts_[i];
}

HVector Manifold::point(const ChartPoint& p) const {
  const auto& c = chart(p.chart);
  if (p.coords.size() != dim_) throw StructuralError("Manifold::point: coordinate dimension mismatch");
  if (!c.domain().contains(p.coords)) throw DomainError("Manifold::point: coordinates outside chart domain");
  return HVector(ambient_, c.map(p.coords));
}

Eigen::MatrixXd Manifold::jacobian(const ChartPoint& p) const {
  const auto& c = chart(p.chart);
  if (p.coords.size() != dim_) throw StructuralError("Manifold::jacobian: coordinate dimension mismatch");
  Eigen::MatrixXd jac = c.jacobian(p.coords);
  if (jac.rows() != ambient_->dim() || jac.cols() != dim_) {
    throw StructuralError("Manifold::jacobian: chart Jacobian has the wrong shape");
  }
  return jac;
}

std::vector<ChartPoint> Manifold::coordinate_hints(const HVector& h) const {
  if (!hint_) return {};
  return hint_(h);
}

Subspace tangent_at(const Manifold& m, const ChartPoint& p, double tol) {
  const Eigen::MatrixXd jac = m.jacobian(p);
  const Eigen::MatrixXd scaled = m.ambient()->sqrt_weights().asDiagonal() * jac;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  const double smin = sv.size() > 0 ? sv[sv.size() - 1] : 0.0;
  if (!(smax > 0.0) || smin <= tol * smax || sv.size() < m.dim()) {
    std::ostringstream os;
    os << "tangent_at: Jacobian is not injective (singular values " << smax << " .. " << smin << ")";
    throw DegenerateChartError(os.str());
  }
  return Subspace::from_euclidean_orthonormal(m.ambient(), svd.matrixU().leftCols(m.dim()), tol);
}

ClosestPoint closest_point(const Manifold& m, const HVector& h, const ChartPoint& y0, const GaussNewtonOptions& options) {
  require_same_space(m.ambient(), h.space(), "closest_point");
  const ManifoldChart& chart = m.chart(y0.chart);
  if (y0.coords.size() != m.dim()) throw StructuralError("closest_point: coordinate dimension mismatch");
  if (!chart.domain().contains(y0.coords)) {
    throw DomainExitError("closest_point: initial coordinates outside the chart domain", y0);
  }
  const Eigen::VectorXd& sw = m.ambient()->sqrt_weights();
  const Eigen::VectorXd target = h.euclidean();
  const double stop = options.gradient_tol * (1.0 + target.norm());

  Eigen::VectorXd y = y0.coords;
  Eigen::VectorXd f = sw.cwiseProduct(chart.map(y)) - target;
  // Consecutive iterations whose undamped step left the chart domain.
  int pushed_out = 0;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const Eigen::MatrixXd jac = sw.asDiagonal() * chart.jacobian(y);
    const Eigen::VectorXd grad = jac.transpose() * f;
    const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-f);
    if (grad.norm() < stop) {
      // A poorly scaled chart can be stationary to tolerance with a residual
      // that one more full step still removes.
      const Eigen::VectorXd trial = y + step;
      if (chart.domain().contains(trial)) {
        const Eigen::VectorXd ft = sw.cwiseProduct(chart.map(trial)) - target;
        if (ft.norm() < 0.5 * f.norm()) {
          y = trial;
          f = ft;
          continue;
        }
      }
      HVector p(m.ambient(), Eigen::VectorXd(chart.map(y)));
      return {ChartPoint{y0.chart, y}, std::move(p), f.norm(), iter};
    }
    pushed_out = chart.domain().contains(y + step) ? 0 : pushed_out + 1;
    if (pushed_out >= 5) {
      throw DomainExitError("closest_point: iterate leaves the chart domain", ChartPoint{y0.chart, y});
    }
    // Armijo test on |f|^2 / 2 with slope -|J step|^2.
    const double phi = 0.5 * f.squaredNorm();
    const double slope = -(jac * step).squaredNorm();
    double scale = 1.0;
    bool inside_any = false;
    bool accepted = false;
    for (int k = 0; k <= options.max_halvings; ++k, scale *= 0.5) {
      const Eigen::VectorXd trial = y + scale * step;
      if (!chart.domain().contains(trial)) continue;
      inside_any = true;
      if ((trial - y).norm() == 0.0) break;
      const Eigen::VectorXd ft = sw.cwiseProduct(chart.map(trial)) - target;
      if (0.5 * ft.squaredNorm() <= phi + 0.25 * scale * slope && ft.norm() < f.norm()) {
        y = trial;
        f = ft;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!inside_any) {
        throw DomainExitError("closest_point: iterate leaves the chart domain", ChartPoint{y0.chart, y});
      }
      // No representable decrease left: y is stationary to working precision
      // if the gradient is at rounding level relative to the residual.
      if (grad.norm() <= 1e-8 * (1.0 + f.norm()) * (1.0 + jac.norm())) {
        HVector p(m.ambient(), Eigen::VectorXd(chart.map(y)));
        return {ChartPoint{y0.chart, y}, std::move(p), f.norm(), iter};
      }
      std::ostringstream os;
      os << "closest_point: line search failed with gradient norm " << grad.norm();
      throw NoConvergenceError(os.str(), ChartPoint{y0.chart, y}, f.norm());
    }
  }
  const Eigen::MatrixXd jac = sw.asDiagonal() * chart.jacobian(y);
  if ((jac.transpose() * f).norm() < stop) {
    HVector p(m.ambient(), Eigen::VectorXd(chart.map(y)));
    return {ChartPoint{y0.chart, y}, std::move(p), f.norm(), options.max_iterations};
  }
  throw NoConvergenceError("closest_point: no convergence within the iteration limit", ChartPoint{y0.chart, y},
                           f.norm());
}

ClosestPoint nearest_point(const Manifold& m, const HVector& h, std::span<const ChartPoint> guesses,
                           const GaussNewtonOptions& options) {
  std::vector<ChartPoint> starts(guesses.begin(), guesses.end());
  for (auto& hint : m.coordinate_hints(h)) starts.push_back(std::move(hint));
  if (starts.empty()) throw ConfigError("nearest_point: no starting coordinates and no model hint");

  std::optional<ClosestPoint> best;
  std::exception_ptr last_error;
  const double exact = 1e-14 * (1.0 + norm(h));
  for (const auto& start : starts) {
    try {
      ClosestPoint cp = closest_point(m, h, start, options);
      if (!best || cp.distance < best->distance) best = std::move(cp);
      if (best->distance <= exact) break;
    } catch (const NumericError&) {
      last_error = std::current_exception();
    }
  }
  if (!best) std::rethrow_exception(last_error);
  return std::move(*best);
}

double jacobian_check(const Manifold& m, const ChartPoint& p) {
  const auto& chart = m.chart(p.chart);
  if (!chart.has_analytic_jacobian()) return 0.0;
  const Eigen::MatrixXd analytic = chart.jacobian(p.coords);
  const Eigen::MatrixXd numeric = chart.fd_jacobian(p.coords);
  const double scale = analytic.norm();
  return scale > 0.0 ? (analytic - numeric).norm() / scale : (analytic - numeric).norm();
}

}  // namespace levyflat
