#include "levyflat/interpolation.hpp"

#include "levyflat/errors.hpp"

#include <algorithm>
#include <cmath>

namespace levyflat {

Eigen::VectorXd lagrange_derivative_weights(const Eigen::VectorXd& x, Eigen::Index first, Eigen::Index count,
                                            Eigen::Index i) {
  Eigen::VectorXd d(count);
  const double xi = x[i];
  for (Eigen::Index a = 0; a < count; ++a) {
    const Eigen::Index j = first + a;
    if (j == i) {
      double s = 0.0;
      for (Eigen::Index b = 0; b < count; ++b) {
        if (first + b != i) s += 1.0 / (xi - x[first + b]);
      }
      d[a] = s;
      continue;
    }
    double num = 1.0;
    double den = 1.0;
    for (Eigen::Index b = 0; b < count; ++b) {
      const Eigen::Index m = first + b;
      if (m == j) continue;
      den *= x[j] - x[m];
      if (m != i) num *= xi - x[m];
    }
    d[a] = num / den;
  }
  return d;
}

MonotoneCubic::MonotoneCubic(Eigen::VectorXd x, Eigen::VectorXd y, bool flat_right_end)
    : x_(std::move(x)), y_(std::move(y)) {
  const Eigen::Index n = x_.size();
  if (n < 2 || y_.size() != n) throw ConfigError("MonotoneCubic: need at least two nodes and matching values");
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (!(x_[i + 1] > x_[i])) throw ConfigError("MonotoneCubic: nodes must be strictly increasing");
  }

  const Eigen::Index width = std::min<Eigen::Index>(5, n);
  m_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index first = std::clamp<Eigen::Index>(i - width / 2, 0, n - width);
    m_[i] = lagrange_derivative_weights(x_, first, width, i).dot(y_.segment(first, width));
  }

  if (flat_right_end) m_[n - 1] = 0.0;

  Eigen::VectorXd delta(n - 1);
  for (Eigen::Index k = 0; k + 1 < n; ++k) delta[k] = (y_[k + 1] - y_[k]) / (x_[k + 1] - x_[k]);
  auto sign = [](double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); };
  // Zero slopes at extrema, next to flat intervals and against the secants.
  for (Eigen::Index i = 0; i < n; ++i) {
    const int left = i > 0 ? sign(delta[i - 1]) : sign(delta[0]);
    const int right = i + 1 < n ? sign(delta[i]) : sign(delta[n - 2]);
    if (left == 0 || left != right || sign(m_[i]) != left) m_[i] = 0.0;
  }
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (delta[k] == 0.0) continue;
    const double a = m_[k] / delta[k];
    const double b = m_[k + 1] / delta[k];
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      m_[k] = tau * a * delta[k];
      m_[k + 1] = tau * b * delta[k];
    }
  }

  cumulative_.resize(n);
  cumulative_[0] = 0.0;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const double h = x_[k + 1] - x_[k];
    // Exact integral of the Hermite cubic over one interval.
    cumulative_[k + 1] = cumulative_[k] + h * (0.5 * (y_[k] + y_[k + 1]) + h * (m_[k] - m_[k + 1]) / 12.0);
  }
}

Eigen::Index MonotoneCubic::locate(double t) const {
  const auto* begin = x_.data();
  const auto* end = x_.data() + x_.size();
  const auto* it = std::upper_bound(begin, end, t);
  const Eigen::Index k = static_cast<Eigen::Index>(it - begin) - 1;
  return std::clamp<Eigen::Index>(k, 0, x_.size() - 2);
}

double MonotoneCubic::operator()(double t) const {
  const Eigen::Index n = x_.size();
  if (t <= x_[0]) return y_[0];
  if (t >= x_[n - 1]) return y_[n - 1];
  const Eigen::Index k = locate(t);
  const double h = x_[k + 1] - x_[k];
  const double u = (t - x_[k]) / h;
  const double u2 = u * u;
  const double u3 = u2 * u;
  return y_[k] * (2 * u3 - 3 * u2 + 1) + h * m_[k] * (u3 - 2 * u2 + u) + y_[k + 1] * (-2 * u3 + 3 * u2) +
         h * m_[k + 1] * (u3 - u2);
}

double MonotoneCubic::derivative(double t) const {
  const Eigen::Index n = x_.size();
  if (t < x_[0] || t > x_[n - 1]) return 0.0;
  const Eigen::Index k = locate(t);
  const double h = x_[k + 1] - x_[k];
  const double u = (t - x_[k]) / h;
  const double u2 = u * u;
  return (y_[k] * (6 * u2 - 6 * u) + y_[k + 1] * (-6 * u2 + 6 * u)) / h + m_[k] * (3 * u2 - 4 * u + 1) +
         m_[k + 1] * (3 * u2 - 2 * u);
}

double MonotoneCubic::antiderivative(double t) const {
  const Eigen::Index n = x_.size();
  if (t <= x_[0]) return y_[0] * (t - x_[0]);
  if (t >= x_[n - 1]) return cumulative_[n - 1] + y_[n - 1] * (t - x_[n - 1]);
  const Eigen::Index k = locate(t);
  const double h = x_[k + 1] - x_[k];
  const double u = (t - x_[k]) / h;
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double u4 = u3 * u;
  const double h00 = 0.5 * u4 - u3 + u;
  const double h10 = 0.25 * u4 - 2.0 * u3 / 3.0 + 0.5 * u2;
  const double h01 = -0.5 * u4 + u3;
  const double h11 = 0.25 * u4 - u3 / 3.0;
  return cumulative_[k] + h * (y_[k] * h00 + h * m_[k] * h10 + y_[k + 1] * h01 + h * m_[k + 1] * h11);
}

double MonotoneCubic::integral(double a, double b) const { return antiderivative(b) - antiderivative(a); }

}  // namespace levyflat
