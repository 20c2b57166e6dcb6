#include "levyflat/spde.hpp"

#include "levyflat/random.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace levyflat {

VectorField constant_field(HVector value) {
  return [value = std::move(value)](const HVector&) { return value; };
}

SPDEProblem::SPDEProblem(SpacePtr space, Semigroup semigroup, Coefficients coefficients, LevyDriver driver)
    : space_(std::move(space)),
      semigroup_(std::move(semigroup)),
      coefficients_(std::move(coefficients)),
      driver_(std::move(driver)) {
  if (!space_) throw ConfigError("SPDEProblem: null space");
  require_same_space(space_, semigroup_.space(), "SPDEProblem");
  if (static_cast<int>(coefficients_.sigma.size()) != driver_.p()) {
    throw StructuralError("SPDEProblem: number of sigma columns differs from the Wiener dimension");
  }
  if (static_cast<int>(coefficients_.gamma.size()) != driver_.q()) {
    throw StructuralError("SPDEProblem: number of gamma columns differs from the jump dimension");
  }
  for (const auto& s : coefficients_.sigma) {
    if (!s) throw ConfigError("SPDEProblem: empty sigma callable");
  }
  for (const auto& g : coefficients_.gamma) {
    if (!g) throw ConfigError("SPDEProblem: empty gamma callable");
  }
}

HVector SPDEProblem::alpha(const HVector& h) const {
  return coefficients_.alpha ? coefficients_.alpha(h) : HVector::zero(space_);
}

HVector SPDEProblem::sigma(int j, const HVector& h) const {
  if (j < 0 || j >= driver_.p()) throw StructuralError("SPDEProblem::sigma: index out of range");
  return coefficients_.sigma[static_cast<std::size_t>(j)](h);
}

HVector SPDEProblem::gamma(int k, const HVector& h) const {
  if (k < 0 || k >= driver_.q()) throw StructuralError("SPDEProblem::gamma: index out of range");
  return coefficients_.gamma[static_cast<std::size_t>(k)](h);
}

HVector jump_coefficient(const SPDEProblem& problem, const HVector& h, const Eigen::VectorXd& x) {
  if (x.size() != problem.driver().q()) throw StructuralError("jump_coefficient: x must have q entries");
  HVector out = HVector::zero(problem.space());
  for (int k = 0; k < problem.driver().q(); ++k) {
    if (x[k] != 0.0) out += x[k] * problem.gamma(k, h);
  }
  return out;
}

const char* to_string(StateFlag flag) {
  switch (flag) {
    case StateFlag::Step:
      return "step";
    case StateFlag::PreJump:
      return "pre";
    case StateFlag::PostJump:
      return "post";
  }
  return "step";
}

namespace {

// Coefficient callables may return anything; a NaN must surface with the time.
HVector checked(const std::function<HVector()>& f, double t, const char* what) {
  try {
    return f();
  } catch (const NumericError& e) {
    std::ostringstream os;
    os << "simulate_mild: " << what << " is not finite at t = " << t << " (" << e.what() << ")";
    throw NumericError(os.str());
  }
}

}  // namespace

MildPath simulate_mild(const SPDEProblem& problem, const HVector& h0, const DriverPath& noise) {
  require_same_space(problem.space(), h0.space(), "simulate_mild");
  const int p = problem.driver().p();
  const int q = problem.driver().q();
  if (noise.p() != p || noise.q() != q) throw StructuralError("simulate_mild: driver path does not match the driver");

  const Semigroup& semigroup = problem.semigroup();
  MildPath path;
  path.states.push_back(PathState{0.0, StateFlag::Step, h0});
  HVector r = h0;

  // W at the left end of the current sub-interval.
  Eigen::VectorXd w_left = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd w_node = Eigen::VectorXd::Zero(p);
  double t_left = 0.0;
  std::size_t next_event = 0;

  auto advance = [&](double t_right, const Eigen::VectorXd& w_right) {
    const double dt = t_right - t_left;
    if (dt <= 0.0) return;
    HVector incr = checked([&] { return problem.alpha(r); }, t_left, "alpha");
    incr *= dt;
    for (int j = 0; j < p; ++j) {
      const double dw = w_right[j] - w_left[j];
      incr += dw * checked([&] { return problem.sigma(j, r); }, t_left, "sigma");
    }
    for (int k = 0; k < q; ++k) {
      const double c = noise.compensator_drift[static_cast<std::size_t>(k)];
      if (c != 0.0) incr += (c * dt) * checked([&] { return problem.gamma(k, r); }, t_left, "gamma");
    }
    r = checked([&] { return semigroup.apply(dt, r + incr); }, t_right, "state");
    t_left = t_right;
    w_left = w_right;
  };

  for (int i = 0; i < noise.steps(); ++i) {
    const double t_next = noise.time_grid[static_cast<std::size_t>(i) + 1];
    const Eigen::VectorXd w_next = w_node + noise.wiener_increments.row(i).transpose();
    while (next_event < noise.events.size() && noise.events[next_event].time <= t_next) {
      const JumpEvent& e = noise.events[next_event++];
      advance(e.time, e.wiener.size() == p ? e.wiener : w_left);
      path.states.push_back(PathState{e.time, StateFlag::PreJump, r, e.coordinate, e.size});
      r = checked([&] { return r + e.size * problem.gamma(e.coordinate, r); }, e.time, "jump");
      path.states.push_back(PathState{e.time, StateFlag::PostJump, r, e.coordinate, e.size});
    }
    advance(t_next, w_next);
    t_left = t_next;
    w_left = w_next;
    w_node = w_next;
    path.states.push_back(PathState{t_next, StateFlag::Step, r});
  }
  return path;
}

MildPath simulate_mild(const SPDEProblem& problem, const HVector& h0, double horizon, double dt, std::uint64_t seed) {
  return simulate_mild(problem, h0, sample_path(problem.driver(), horizon, dt, seed));
}

ConvergenceResult convergence_order(const SPDEProblem& problem, const HVector& h0, double horizon,
                                    const std::vector<double>& dt_list, int n_paths, std::uint64_t seed,
                                    double reference_dt) {
  if (dt_list.size() < 2) throw ConfigError("convergence_order: need at least two step sizes");
  if (n_paths < 1) throw ConfigError("convergence_order: n_paths must be >= 1");
  std::vector<int> factors;
  for (std::size_t i = 0; i < dt_list.size(); ++i) {
    if (i > 0 && !(dt_list[i] < dt_list[i - 1])) throw ConfigError("convergence_order: dt_list must be descending");
    if (!(reference_dt < dt_list[i])) throw ConfigError("convergence_order: reference_dt must be the smallest step");
    const double ratio = dt_list[i] / reference_dt;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * ratio) {
      throw ConfigError("convergence_order: every dt must be an integer multiple of reference_dt");
    }
    factors.push_back(static_cast<int>(rounded));
  }

  ConvergenceResult out;
  out.dts = dt_list;
  out.errors.assign(dt_list.size(), 0.0);
  double ref_scale = 0.0;
  for (int path = 0; path < n_paths; ++path) {
    const DriverPath fine = sample_path(problem.driver(), horizon, reference_dt, derive_seed(seed, path));
    const HVector reference = simulate_mild(problem, h0, fine).terminal();
    ref_scale += norm(reference);
    for (std::size_t i = 0; i < dt_list.size(); ++i) {
      const HVector coarse = simulate_mild(problem, h0, fine.coarsen(factors[i])).terminal();
      out.errors[i] += norm(coarse - reference);
    }
  }
  for (auto& e : out.errors) e /= n_paths;
  ref_scale /= n_paths;

  const double floor = 1e-12 * (1.0 + ref_scale);
  bool all_small = true;
  for (double e : out.errors) all_small = all_small && e < floor;
  if (all_small) {
    out.skipped = true;
    out.slope = std::numeric_limits<double>::quiet_NaN();
    out.r_squared = std::numeric_limits<double>::quiet_NaN();
    return out;
  }

  const auto m = static_cast<double>(dt_list.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < dt_list.size(); ++i) {
    const double x = std::log(dt_list[i]);
    const double y = std::log(std::max(out.errors[i], std::numeric_limits<double>::min()));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double cov = sxy - sx * sy / m;
  const double varx = sxx - sx * sx / m;
  const double vary = syy - sy * sy / m;
  out.slope = cov / varx;
  out.r_squared = vary > 0.0 ? cov * cov / (varx * vary) : 1.0;
  return out;
}

}  // namespace levyflat
