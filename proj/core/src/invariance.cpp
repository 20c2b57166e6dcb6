#include "levyflat/invariance.hpp"

#include "levyflat/random.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace levyflat {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Skip:
      return "skip";
  }
  return "fail";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void finish(TestReport& r) {
  r.samples = static_cast<int>(r.details.size());
  r.max_residual = 0.0;
  for (const auto& d : r.details) r.max_residual = std::max(r.max_residual, d.residual);
  r.pass = r.max_residual < r.threshold;
  r.verdict = r.pass ? Verdict::Pass : Verdict::Fail;
}

// Coordinates of the linearized preimage of h + g, when inside the chart.
std::vector<ChartPoint> shifted_guesses(const Manifold& m, const ChartPoint& y, const HVector& g) {
  std::vector<ChartPoint> guesses{y};
  const Eigen::MatrixXd jac = m.ambient()->sqrt_weights().asDiagonal() * m.jacobian(y);
  Eigen::VectorXd linear = y.coords + jac.completeOrthogonalDecomposition().solve(g.euclidean());
  if (m.chart(y.chart).domain().contains(linear)) guesses.insert(guesses.begin(), ChartPoint{y.chart, linear});
  return guesses;
}

bool in_declared_support(const JumpMeasureSpec& spec, double x) {
  if (spec.kind() == JumpMeasureSpec::Kind::Atoms) {
    for (const auto& a : spec.atom_list()) {
      if (std::abs(a.location - x) <= 1e-12 * (1.0 + std::abs(x))) return true;
    }
    return false;
  }
  for (const auto& iv : spec.support()) {
    if (x >= iv.lower && x <= iv.upper) return true;
  }
  return false;
}

}  // namespace

TestReport tangency_test(const Manifold& m, const SPDEProblem& problem, const std::vector<int>& indices,
                         std::span<const ChartPoint> plan, double threshold) {
  require_same_space(m.ambient(), problem.space(), "tangency_test");
  TestReport report;
  report.name = "tangency";
  report.threshold = threshold;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const HVector h = m.point(plan[i]);
    const Subspace tangent = tangent_at(m, plan[i]);
    for (int k : indices) {
      const HVector g = problem.gamma(k, h);
      const double gn = norm(g);
      const double res = gn > 0.0 ? norm(g - project(g, tangent)) / gn : 0.0;
      std::ostringstream note;
      note << "k=" << k + 1;
      report.details.push_back(SampleRecord{i, res, note.str()});
    }
  }
  finish(report);
  report.metrics["jump_coordinates"] = static_cast<double>(indices.size());
  report.label = report.pass ? "small-jump volatilities tangent to M" : "small-jump volatilities leave the tangent spaces";
  if (indices.empty()) {
    report.verdict = Verdict::Skip;
    report.pass = false;
    report.threshold = 0.0;
    report.label = "no small-jump coordinates: nothing to test";
  }
  return report;
}

TestReport jump_closure_test(const Manifold& m, const SPDEProblem& problem, int k, const std::vector<double>& x_grid,
                             std::span<const ChartPoint> plan, double threshold, const GaussNewtonOptions& gn) {
  require_same_space(m.ambient(), problem.space(), "jump_closure_test");
  const auto& spec = problem.driver().jump(k);
  for (double x : x_grid) {
    if (!in_declared_support(spec, x)) {
      std::ostringstream os;
      os << "jump_closure_test: x = " << x << " is outside the declared support of coordinate " << k + 1;
      throw ConfigError(os.str());
    }
  }
  TestReport report;
  report.name = "jump-closure";
  report.threshold = threshold;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const HVector h = m.point(plan[i]);
    const HVector g = problem.gamma(k, h);
    for (double x : x_grid) {
      const HVector shift = x * g;
      const HVector target = h + shift;
      std::ostringstream note;
      note << "x=" << x;
      double res = kInf;
      try {
        res = nearest_point(m, target, shifted_guesses(m, plan[i], shift), gn).distance;
      } catch (const NumericError& e) {
        note << " projection failed: " << e.what();
      }
      report.details.push_back(SampleRecord{i, res, note.str()});
    }
  }
  finish(report);
  report.metrics["jump_coordinate"] = k + 1;
  return report;
}

namespace {

struct PathResidual {
  double max_distance = 0.0;
  // Distance at every stored Step state, in grid order.
  std::vector<double> step_distances;
  std::string failure;
};

PathResidual path_residual(const Manifold& m, const MildPath& path, const ChartPoint& start,
                           const GaussNewtonOptions& gn, double good_enough) {
  PathResidual out;
  ChartPoint warm = start;
  for (const auto& s : path.states) {
    double d = kInf;
    try {
      bool done = false;
      try {
        ClosestPoint cp = closest_point(m, s.value, warm, gn);
        if (cp.distance < good_enough) {
          d = cp.distance;
          warm = cp.coords;
          done = true;
        }
      } catch (const NumericError&) {
      }
      if (!done) {
        const ChartPoint guesses[] = {warm, start};
        ClosestPoint cp = nearest_point(m, s.value, guesses, gn);
        d = cp.distance;
        warm = cp.coords;
      }
    } catch (const NumericError& e) {
      if (out.failure.empty()) {
        std::ostringstream os;
        os << "t=" << s.time << ": " << e.what();
        out.failure = os.str();
      }
    }
    out.max_distance = std::max(out.max_distance, d);
    if (s.flag == StateFlag::Step) out.step_distances.push_back(d);
  }
  return out;
}

}  // namespace

TestReport path_invariance_test(const Manifold& m, const SPDEProblem& problem, std::span<const ChartPoint> starts,
                                const PathInvarianceOptions& options, std::vector<MildPath>* kept) {
  require_same_space(m.ambient(), problem.space(), "path_invariance_test");
  if (starts.empty()) throw ConfigError("path_invariance_test: no starting points");
  if (options.n_paths < 1) throw ConfigError("path_invariance_test: n_paths must be >= 1");
  std::vector<HVector> start_points;
  for (const auto& y : starts) {
    HVector h = m.point(y);
    if (closest_point(m, h, y, options.gauss_newton).distance >= 1e-10) {
      throw ConfigError("path_invariance_test: starting point is not on the manifold");
    }
    start_points.push_back(std::move(h));
  }

  TestReport report;
  report.name = "path-invariance";
  report.threshold = options.threshold;
  const double good_enough = 0.1 * options.threshold;
  const double fine_dt = options.halving ? 0.5 * options.dt : options.dt;
  const std::vector<double> grid = regular_grid(options.horizon, options.dt);
  std::vector<double> trace(grid.size(), 0.0);
  double residual_half = 0.0;

  for (int i = 0; i < options.n_paths; ++i) {
    const std::size_t which = static_cast<std::size_t>(i) % starts.size();
    const DriverPath fine = sample_path(problem.driver(), options.horizon, fine_dt, derive_seed(options.seed, i));
    const DriverPath noise = options.halving ? fine.coarsen(2) : fine;
    const MildPath path = simulate_mild(problem, start_points[which], noise);
    if (kept && static_cast<std::size_t>(i) < kept->size()) (*kept)[static_cast<std::size_t>(i)] = path;
    PathResidual res = path_residual(m, path, starts[which], options.gauss_newton, good_enough);
    for (std::size_t j = 0; j < trace.size() && j < res.step_distances.size(); ++j) {
      trace[j] = std::max(trace[j], res.step_distances[j]);
    }
    report.details.push_back(SampleRecord{static_cast<std::size_t>(i), res.max_distance, res.failure});
    if (options.halving) {
      const MildPath half = simulate_mild(problem, start_points[which], fine);
      residual_half =
          std::max(residual_half, path_residual(m, half, starts[which], options.gauss_newton, good_enough).max_distance);
    }
  }
  finish(report);
  for (std::size_t j = 0; j < grid.size(); ++j) report.trace.emplace_back(grid[j], trace[j]);

  std::ostringstream label;
  label << "dt=" << options.dt << ", threshold=" << options.threshold;
  report.metrics["dt"] = options.dt;
  report.metrics["horizon"] = options.horizon;
  report.metrics["n_paths"] = options.n_paths;
  report.metrics["residual_dt"] = report.max_residual;
  if (options.halving) {
    const double floor = 1e-14;
    double ratio = std::numeric_limits<double>::quiet_NaN();
    if (report.max_residual > floor || residual_half > floor) ratio = report.max_residual / std::max(residual_half, floor);
    report.metrics["residual_half_dt"] = residual_half;
    report.metrics["dt_ratio"] = ratio;
    report.metrics["ratio_cutoff"] = options.ratio_cutoff;
    if (std::isnan(ratio)) {
      label << "; residual at rounding level at dt and dt/2";
    } else if (ratio >= options.ratio_cutoff) {
      label << "; residual contracts under dt halving (ratio " << ratio << "), scheme error";
    } else {
      label << "; residual does not contract under dt halving (ratio " << ratio
            << "): a floor from the spatial discretization or a genuine departure from M";
    }
  }
  const std::string prefix = report.pass ? "consistent with invariance at " : "not consistent with invariance at ";
  report.label = prefix + label.str();
  return report;
}

TestReport flatness_bound_check(const Manifold& m, const SPDEProblem& problem, const std::vector<int>& indices,
                                std::span<const ChartPoint> plan, const FlatnessOptions& options) {
  require_same_space(m.ambient(), problem.space(), "flatness_bound_check");
  TestReport report;
  report.name = "flatness-bound";
  report.threshold = 0.5;
  if (indices.empty()) {
    report.verdict = Verdict::Skip;
    report.pass = false;
    report.threshold = 0.0;
    report.label = "no small-jump coordinates: no statement on the flatness is possible";
    return report;
  }
  if (plan.empty()) throw ConfigError("flatness_bound_check: empty sample plan");

  auto volatility_span = [&](const ChartPoint& y) {
    const HVector h = m.point(y);
    std::vector<HVector> cols;
    for (int k : indices) cols.push_back(problem.gamma(k, h));
    return orthonormalize(cols, kDefaultRankTol);
  };

  std::vector<Subspace> all_spans;
  int flatness_global = m.dim();
  int d_min = m.dim();
  for (std::size_t i = 0; i < plan.size(); ++i) {
    FlatnessOptions local = options;
    local.seed = derive_seed(options.seed, i);
    const auto samples = sample_coordinate_ball(m, plan[i], local.radius, local.n_samples, local.seed);
    std::vector<Subspace> spans{volatility_span(plan[i])};
    for (const auto& s : samples) spans.push_back(volatility_span(s));
    const int d = intersect(spans, options.tol).dim();
    const int fl = flatness_at(m, plan[i], local).flatness;
    flatness_global = std::min(flatness_global, fl);
    d_min = std::min(d_min, d);
    std::ostringstream note;
    note << "d=" << d << " flatness=" << fl;
    report.details.push_back(SampleRecord{i, static_cast<double>(std::max(0, d - fl)), note.str()});
    all_spans.insert(all_spans.end(), spans.begin(), spans.end());
  }
  const int d_global = intersect(all_spans, options.tol).dim();
  std::ostringstream note;
  note << "global d=" << d_global << " flatness=" << flatness_global;
  report.details.push_back(
      SampleRecord{plan.size(), static_cast<double>(std::max(0, d_global - flatness_global)), note.str()});
  finish(report);
  report.metrics["d_local_min"] = d_min;
  report.metrics["d_global"] = d_global;
  report.metrics["flatness_global"] = flatness_global;
  report.label = report.pass ? "flatness >= dim of the common small-jump volatility span"
                             : "flatness below the common small-jump volatility span";
  return report;
}

}  // namespace levyflat
