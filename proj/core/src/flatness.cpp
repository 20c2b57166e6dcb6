#include "levyflat/flatness.hpp"

#include "levyflat/random.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace levyflat {

std::vector<ChartPoint> sample_coordinate_ball(const Manifold& m, const ChartPoint& center, double radius, int count,
                                               std::uint64_t seed) {
  if (!(radius > 0.0)) throw ConfigError("sample_coordinate_ball: radius must be positive");
  if (count < 0) throw ConfigError("sample_coordinate_ball: negative sample count");
  const auto& box = m.chart(center.chart).domain();
  const int dim = m.dim();
  Engine engine(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<ChartPoint> out;
  out.reserve(static_cast<std::size_t>(count));
  const long max_attempts = 1000L * count + 1000L;
  long attempts = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++attempts > max_attempts) {
      throw NumericError("sample_coordinate_ball: ball barely intersects the chart domain");
    }
    Eigen::VectorXd dir(dim);
    for (int i = 0; i < dim; ++i) dir[i] = gauss(engine);
    const double len = dir.norm();
    if (len == 0.0) continue;
    const double r = radius * std::pow(unit(engine), 1.0 / dim);
    Eigen::VectorXd y = center.coords + (r / len) * dir;
    if (box.contains(y)) out.push_back(ChartPoint{center.chart, std::move(y)});
  }
  return out;
}

FlatnessReport flatness_at(const Manifold& m, const ChartPoint& base, const FlatnessOptions& options) {
  if (options.n_samples < 1) throw ConfigError("flatness_at: n_samples must be >= 1");
  const auto samples = sample_coordinate_ball(m, base, options.radius, options.n_samples, options.seed);

  std::vector<Subspace> tangents;
  tangents.reserve(samples.size() + 1);
  tangents.push_back(tangent_at(m, base));
  for (const auto& s : samples) tangents.push_back(tangent_at(m, s));

  Subspace common = intersect(tangents, options.tol);

  const Eigen::MatrixXd& q0 = tangents.front().euclidean_basis();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(q0.cols(), q0.cols());
  for (std::size_t j = 1; j < tangents.size(); ++j) {
    const Eigen::MatrixXd& qj = tangents[j].euclidean_basis();
    const Eigen::MatrixXd r = q0 - qj * (qj.transpose() * q0);
    gram += r.transpose() * r;
  }
  gram /= static_cast<double>(tangents.size() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  std::vector<double> spectrum(static_cast<std::size_t>(q0.cols()));
  for (Eigen::Index i = 0; i < q0.cols(); ++i) {
    spectrum[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, eig.eigenvalues()[q0.cols() - 1 - i]));
  }
  double above = 1.0;
  double below = 0.0;
  for (double s : spectrum) {
    if (s > options.tol) {
      above = std::min(above, s);
    } else {
      below = std::max(below, s);
    }
  }

  const int d = common.dim();
  return FlatnessReport{
      .base_point = m.point(base),
      .base_coords = base,
      .flatness = d,
      .common_subspace = std::move(common),
      .samples_used = static_cast<int>(samples.size()),
      .radius = options.radius,
      .tol = options.tol,
      .seed = options.seed,
      .spectrum = std::move(spectrum),
      .singular_value_gap = above - below,
  };
}

GlobalFlatness flatness_global(const Manifold& m, std::span<const ChartPoint> plan, const FlatnessOptions& options) {
  if (plan.empty()) throw ConfigError("flatness_global: empty sample plan");
  GlobalFlatness out;
  out.flatness = m.dim();
  out.per_point.reserve(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    FlatnessOptions local = options;
    local.seed = derive_seed(options.seed, i);
    out.per_point.push_back(flatness_at(m, plan[i], local));
    out.flatness = std::min(out.flatness, out.per_point.back().flatness);
  }
  return out;
}

ChainCheck chain_consistency(std::span<const FlatnessReport> reports,
                             std::span<const std::pair<std::size_t, std::size_t>> overlap_pairs, double angle_tol) {
  ChainCheck out;
  for (const auto& [i, j] : overlap_pairs) {
    if (i >= reports.size() || j >= reports.size()) throw StructuralError("chain_consistency: pair index out of range");
    const Subspace& a = reports[i].common_subspace;
    const Subspace& b = reports[j].common_subspace;
    double angle = 0.0;
    if (a.dim() != b.dim()) {
      angle = std::numeric_limits<double>::infinity();
    } else if (a.dim() > 0) {
      angle = max_principal_angle(a, b);
    }
    out.angles.push_back(angle);
    if (!(angle < angle_tol)) out.consistent = false;
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> overlapping_pairs(std::span<const FlatnessReport> reports) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i + 1 < reports.size(); ++i) {
    const auto& a = reports[i];
    const auto& b = reports[i + 1];
    if (a.base_coords.chart != b.base_coords.chart) continue;
    if ((a.base_coords.coords - b.base_coords.coords).norm() < a.radius + b.radius) pairs.emplace_back(i, i + 1);
  }
  return pairs;
}

Decomposition decompose(const Manifold& m, const Subspace& l, std::span<const ChartPoint> plan,
                        const DecomposeOptions& options) {
  require_same_space(m.ambient(), l.space(), "decompose");
  if (l.dim() > m.dim()) throw ConfigError("decompose: L has larger dimension than the manifold");
  if (!(options.shift_extent >= 0.0) || options.shifts_per_direction < 1) {
    throw ConfigError("decompose: invalid shift configuration");
  }

  std::vector<HVector> directions;
  for (int j = 0; j < l.dim(); ++j) directions.push_back(l.basis_vector(j));
  if (l.dim() >= 2) {
    HVector diag = HVector::zero(m.ambient());
    for (const auto& d : directions) diag += d;
    directions.push_back((1.0 / norm(diag)) * diag);
  }
  std::vector<double> magnitudes;
  for (int k = 1; k <= options.shifts_per_direction; ++k) {
    const double s = options.shift_extent * k / options.shifts_per_direction;
    magnitudes.push_back(s);
    magnitudes.push_back(-s);
  }

  Decomposition out;
  const Eigen::VectorXd& sw = m.ambient()->sqrt_weights();
  for (const auto& y : plan) {
    const HVector h = m.point(y);
    const Subspace tangent = tangent_at(m, y);
    DecompositionSample sample{y, h - project(h, l), max_principal_angle(l, tangent), 0.0, {}};
    out.max_tangency_angle = std::max(out.max_tangency_angle, sample.tangency_angle);
    if (!(sample.tangency_angle < options.tangency_tol)) out.tangency_ok = false;

    const Eigen::MatrixXd scaled_jac = sw.asDiagonal() * m.jacobian(y);
    const auto solver = scaled_jac.completeOrthogonalDecomposition();
    for (const auto& dir : directions) {
      for (double s : magnitudes) {
        const HVector g = s * dir;
        const HVector target = h + g;
        std::vector<ChartPoint> guesses{y};
        Eigen::VectorXd linear = y.coords + solver.solve(g.euclidean());
        if (m.chart(y.chart).domain().contains(linear)) guesses.push_back(ChartPoint{y.chart, std::move(linear)});
        double residual = std::numeric_limits<double>::infinity();
        try {
          residual = nearest_point(m, target, guesses, options.gauss_newton).distance;
        } catch (const NumericError& e) {
          if (sample.failure.empty()) sample.failure = e.what();
        }
        sample.max_shift_residual = std::max(sample.max_shift_residual, residual);
      }
    }
    out.max_residual = std::max(out.max_residual, sample.max_shift_residual);
    out.n_points.push_back(sample.normal_part);
    out.samples.push_back(std::move(sample));
  }
  return out;
}

Classification classify(int manifold_dim, int flatness) {
  if (flatness < 0 || flatness > manifold_dim) throw ConfigError("classify: flatness outside [0, dim M]");
  if (flatness == manifold_dim) return Classification::AffineSpace;
  if (flatness == manifold_dim - 1) return Classification::Foliation;
  return Classification::General;
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::AffineSpace:
      return "AffineSpace";
    case Classification::Foliation:
      return "Foliation";
    case Classification::General:
      return "General";
  }
  return "General";
}

}  // namespace levyflat
