#pragma once

// Independent reference computations used by the tests. None of these call
// into the library's subspace or projection code.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

/// Weighted-orthonormal basis of span(v) via Cholesky of the Gram matrix,
/// returned in the sqrt(W)-scaled frame. Assumes full column rank.
inline Eigen::MatrixXd scaled_basis(const Eigen::MatrixXd& v, const Eigen::VectorXd& w) {
  if (v.cols() == 0) return Eigen::MatrixXd(v.rows(), 0);
  const Eigen::MatrixXd gram = v.transpose() * w.asDiagonal() * v;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  const Eigen::MatrixXd b = llt.matrixU().solve<Eigen::OnTheRight>(v);
  return w.cwiseSqrt().asDiagonal() * b;
}

struct IntersectionOracle {
  int dim = 0;
  /// Orthonormal basis in the scaled frame.
  Eigen::MatrixXd basis;
};

/// Eigenvectors of P1 P2 P1 with eigenvalue 1 span the intersection.
/// Eigenvalues are cos^2 of the principal angles; keep those >= 1 - sin_tol^2.
inline IntersectionOracle p1p2p1(const Eigen::MatrixXd& q1, const Eigen::MatrixXd& q2, double sin_tol) {
  const Eigen::MatrixXd p1 = q1 * q1.transpose();
  const Eigen::MatrixXd p2 = q2 * q2.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p1 * p2 * p1);
  const double floor = 1.0 - sin_tol * sin_tol;
  std::vector<int> keep;
  for (int i = 0; i < eig.eigenvalues().size(); ++i) {
    if (eig.eigenvalues()[i] >= floor) keep.push_back(i);
  }
  IntersectionOracle out;
  out.dim = static_cast<int>(keep.size());
  out.basis.resize(q1.rows(), out.dim);
  for (int j = 0; j < out.dim; ++j) out.basis.col(j) = eig.eigenvectors().col(keep[j]);
  return out;
}

/// Largest principal angle between orthonormal bases (scaled frame).
inline double max_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() == 0 || b.cols() == 0) return 0.0;
  // sin of the largest angle = |(I - B B^T) A| in spectral norm for equal dims.
  const Eigen::MatrixXd r = a - b * (b.transpose() * a);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r);
  return std::asin(std::min(1.0, svd.singularValues()(0)));
}

/// Rank with singular values above tol * sigma_max.
inline int svd_rank(const Eigen::MatrixXd& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i) r += s(i) > tol * s(0);
  return r;
}

inline Eigen::MatrixXd gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = n01(rng);
  return m;
}

/// min over a dense eta grid of |(x, y) - (eta, sin 2 pi eta)|, refined by
/// golden-section search around the best grid point.
inline double sine_graph_distance(double x, double y) {
  auto d2 = [&](double eta) {
    const double dx = x - eta;
    const double dy = y - std::sin(2.0 * kPi * eta);
    return dx * dx + dy * dy;
  };
  const double lo = x - 2.5;
  const int n = 50000;
  const double h = 5.0 / n;
  double best = lo;
  double best_v = d2(lo);
  for (int i = 1; i <= n; ++i) {
    const double eta = lo + i * h;
    const double v = d2(eta);
    if (v < best_v) {
      best_v = v;
      best = eta;
    }
  }
  double a = best - h, b = best + h;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (d2(c) < d2(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  return std::sqrt(std::min(best_v, d2(0.5 * (a + b))));
}

}  // namespace oracle
