#include "levyflat/levy.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace levyflat {

namespace {

void check_intensity(double intensity) {
  if (!(intensity > 0.0) || !std::isfinite(intensity)) {
    throw ConfigError("jump measure: intensity must be positive and finite");
  }
}

std::vector<Interval> merge_intervals(std::vector<Interval> in) {
  if (in.empty()) throw ConfigError("jump measure: empty support");
  for (const auto& iv : in) {
    if (!std::isfinite(iv.lower) || !std::isfinite(iv.upper) || !(iv.upper > iv.lower)) {
      throw ConfigError("jump measure: support intervals must be bounded with lower < upper");
    }
  }
  std::sort(in.begin(), in.end(), [](const Interval& a, const Interval& b) { return a.lower < b.lower; });
  std::vector<Interval> out{in.front()};
  for (std::size_t i = 1; i < in.size(); ++i) {
    if (in[i].lower <= out.back().upper) {
      out.back().upper = std::max(out.back().upper, in[i].upper);
    } else {
      out.push_back(in[i]);
    }
  }
  return out;
}

double gk_integrate(const std::function<double(double)>& f, double a, double b) {
  double error = 0.0;
  double l1 = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-13, &error, &l1);
  if (!std::isfinite(value) || error > 1e-9 * l1 + 1e-15) {
    std::ostringstream os;
    os << "quadrature did not converge on [" << a << ", " << b << "] (error estimate " << error << ")";
    throw NumericError(os.str());
  }
  return value;
}

}  // namespace

JumpMeasureSpec JumpMeasureSpec::uniform(double intensity, double lower, double upper) {
  check_intensity(intensity);
  JumpMeasureSpec s;
  s.kind_ = Kind::Uniform;
  s.intensity_ = intensity;
  s.support_ = merge_intervals({{lower, upper}});
  s.mean_ = 0.5 * (lower + upper);
  std::ostringstream os;
  os << "uniform[" << lower << ", " << upper << "]";
  s.label_ = os.str();
  return s;
}

JumpMeasureSpec JumpMeasureSpec::atoms(double intensity, std::vector<Atom> atoms) {
  check_intensity(intensity);
  if (atoms.empty()) throw ConfigError("jump measure: atom list is empty");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!std::isfinite(a.location) || !(a.mass > 0.0)) {
      throw ConfigError("jump measure: atoms need finite locations and positive masses");
    }
    total += a.mass;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("jump measure: atom masses must sum to 1");
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.location < b.location; });
  JumpMeasureSpec s;
  s.kind_ = Kind::Atoms;
  s.intensity_ = intensity;
  s.atoms_ = std::move(atoms);
  for (auto& a : s.atoms_) a.mass /= total;
  for (const auto& a : s.atoms_) s.mean_ += a.mass * a.location;
  std::ostringstream os;
  os << "atoms{";
  for (std::size_t i = 0; i < s.atoms_.size(); ++i) {
    os << (i ? ", " : "") << s.atoms_[i].location << ":" << s.atoms_[i].mass;
  }
  os << "}";
  s.label_ = os.str();
  return s;
}

JumpMeasureSpec JumpMeasureSpec::density(double intensity, std::function<double(double)> pdf,
                                         std::vector<Interval> support, std::string label) {
  check_intensity(intensity);
  if (!pdf) throw ConfigError("jump measure: missing density");
  JumpMeasureSpec s;
  s.kind_ = Kind::Density;
  s.intensity_ = intensity;
  s.support_ = merge_intervals(std::move(support));
  s.pdf_ = std::move(pdf);
  s.label_ = std::move(label);

  double length = 0.0;
  for (const auto& iv : s.support_) length += iv.upper - iv.lower;
  for (int i = 0; i < 100; ++i) {
    double offset = (i + 0.5) * length / 100.0;
    for (const auto& iv : s.support_) {
      const double w = iv.upper - iv.lower;
      if (offset <= w) {
        const double v = s.pdf_(iv.lower + offset);
        if (!(v > 0.0) || !std::isfinite(v)) {
          throw ConfigError("jump measure: density is not positive on its declared support");
        }
        break;
      }
      offset -= w;
    }
  }
  double mass = 0.0;
  for (const auto& iv : s.support_) mass += gk_integrate(s.pdf_, iv.lower, iv.upper);
  if (std::abs(mass - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "jump measure: density integrates to " << mass << ", expected 1";
    throw ConfigError(os.str());
  }
  s.mean_ = 0.0;
  for (const auto& iv : s.support_) {
    s.mean_ += gk_integrate([&](double x) { return x * s.pdf_(x); }, iv.lower, iv.upper);
  }
  s.build_inverse_cdf();
  return s;
}

void JumpMeasureSpec::build_inverse_cdf() {
  constexpr int kCellsPerInterval = 4096;
  cdf_x_.clear();
  cdf_p_.clear();
  double acc = 0.0;
  for (const auto& iv : support_) {
    const double h = (iv.upper - iv.lower) / kCellsPerInterval;
    cdf_x_.push_back(iv.lower);
    cdf_p_.push_back(acc);
    for (int i = 0; i < kCellsPerInterval; ++i) {
      const double a = iv.lower + i * h;
      const double b = i + 1 == kCellsPerInterval ? iv.upper : a + h;
      acc += (b - a) / 6.0 * (pdf_(a) + 4.0 * pdf_(0.5 * (a + b)) + pdf_(b));
      cdf_x_.push_back(b);
      cdf_p_.push_back(acc);
    }
  }
  for (auto& p : cdf_p_) p /= acc;
}

double JumpMeasureSpec::pdf(double x) const {
  switch (kind_) {
    case Kind::Uniform:
      return x >= support_[0].lower && x <= support_[0].upper ? 1.0 / (support_[0].upper - support_[0].lower) : 0.0;
    case Kind::Density:
      for (const auto& iv : support_) {
        if (x >= iv.lower && x <= iv.upper) return pdf_(x);
      }
      return 0.0;
    case Kind::Atoms:
      return 0.0;
  }
  return 0.0;
}

double JumpMeasureSpec::integrate(const std::function<double(double)>& f, const std::vector<double>& breaks) const {
  if (kind_ == Kind::Atoms) {
    double acc = 0.0;
    for (const auto& a : atoms_) acc += a.mass * f(a.location);
    return intensity_ * acc;
  }
  double acc = 0.0;
  for (const auto& iv : support_) {
    std::vector<double> cuts{iv.lower};
    for (double b : breaks) {
      if (b > iv.lower && b < iv.upper) cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(iv.upper);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      acc += gk_integrate([&](double x) { return f(x) * pdf(x); }, cuts[i], cuts[i + 1]);
    }
  }
  return intensity_ * acc;
}

double JumpMeasureSpec::mean_jump() const { return mean_; }

Interval JumpMeasureSpec::hull() const {
  if (kind_ == Kind::Atoms) return {atoms_.front().location, atoms_.back().location};
  return {support_.front().lower, support_.back().upper};
}

double JumpMeasureSpec::sample(Engine& engine) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(engine);
  switch (kind_) {
    case Kind::Uniform:
      return support_[0].lower + u * (support_[0].upper - support_[0].lower);
    case Kind::Atoms: {
      double acc = 0.0;
      for (const auto& a : atoms_) {
        acc += a.mass;
        if (u < acc) return a.location;
      }
      return atoms_.back().location;
    }
    case Kind::Density: {
      const auto it = std::upper_bound(cdf_p_.begin(), cdf_p_.end(), u);
      if (it == cdf_p_.begin()) return cdf_x_.front();
      if (it == cdf_p_.end()) return cdf_x_.back();
      const auto i = static_cast<std::size_t>(it - cdf_p_.begin());
      const double p0 = cdf_p_[i - 1];
      const double p1 = cdf_p_[i];
      const double frac = p1 > p0 ? (u - p0) / (p1 - p0) : 0.0;
      return cdf_x_[i - 1] + frac * (cdf_x_[i] - cdf_x_[i - 1]);
    }
  }
  return 0.0;
}

std::string JumpMeasureSpec::describe() const {
  std::ostringstream os;
  os << "lambda=" << intensity_ << " " << label_;
  return os.str();
}

LevyDriver::LevyDriver(int wiener_dim, std::vector<JumpMeasureSpec> jumps, bool wiener_in_x)
    : p_(wiener_dim), jumps_(std::move(jumps)), wiener_in_x_(wiener_in_x) {
  if (p_ < 0) throw ConfigError("LevyDriver: Wiener dimension must be >= 0");
  if (wiener_in_x_ && p_ < 1) throw ConfigError("LevyDriver: a Wiener part in X needs p >= 1");
}

const JumpMeasureSpec& LevyDriver::jump(int k) const {
  if (k < 0 || k >= q()) throw StructuralError("LevyDriver: jump coordinate out of range");
  return jumps_[static_cast<std::size_t>(k)];
}

double LevyDriver::compensator_rate(int k) const {
  const auto& j = jump(k);
  return -j.intensity() * j.mean_jump();
}

std::vector<int> small_jump_indices(const LevyDriver& driver, double eps_min) {
  if (!(eps_min > 0.0)) throw ConfigError("small_jump_indices: eps_min must be positive");
  std::vector<int> out;
  for (int k = 0; k < driver.q(); ++k) {
    const auto& spec = driver.jump(k);
    if (spec.kind() == JumpMeasureSpec::Kind::Atoms) continue;
    for (const auto& iv : spec.support()) {
      const bool right = iv.lower <= 0.0 && iv.upper >= eps_min;
      const bool left = iv.lower <= -eps_min && iv.upper >= 0.0;
      if (right || left) {
        out.push_back(k);
        break;
      }
    }
  }
  return out;
}

double moment_check(const JumpMeasureSpec& spec) {
  return spec.integrate(
      [](double x) {
        const double x2 = x * x;
        return std::max(x2, x2 * x2);
      },
      {-1.0, 1.0});
}

namespace {

const JumpMeasureSpec* scalar_jump(const LevyDriver& driver, const char* context) {
  if (driver.q() == 1) return &driver.jump(0);
  if (driver.q() == 0 && driver.wiener_in_x()) return nullptr;
  throw ConfigError(std::string(context) + ": needs a scalar driver (q = 1, or q = 0 with a Wiener part)");
}

}  // namespace

namespace {

// e^u - 1 - u without cancellation for small u.
double exp_remainder(double u) {
  if (std::abs(u) > 0.1) return std::expm1(u) - u;
  double term = 0.5 * u * u;
  double sum = term;
  for (int k = 3; k < 20 && std::abs(term) > 1e-17 * std::abs(sum); ++k) {
    term *= u / k;
    sum += term;
  }
  return sum;
}

}  // namespace

double cumulant(const LevyDriver& driver, double z) {
  const JumpMeasureSpec* jump = scalar_jump(driver, "cumulant");
  double value = driver.wiener_in_x() ? 0.5 * z * z : 0.0;
  if (jump) value += jump->integrate([z](double x) { return exp_remainder(z * x); }, {0.0});
  return value;
}

double cumulant_prime(const LevyDriver& driver, double z) {
  const JumpMeasureSpec* jump = scalar_jump(driver, "cumulant_prime");
  double value = driver.wiener_in_x() ? z : 0.0;
  if (jump) value += jump->integrate([z](double x) { return x * std::expm1(z * x); }, {0.0});
  return value;
}

Eigen::VectorXd DriverPath::wiener_at(int i) const {
  if (i < 0 || i > steps()) throw StructuralError("DriverPath::wiener_at: node out of range");
  if (i == 0) return Eigen::VectorXd::Zero(p());
  return wiener_increments.topRows(i).colwise().sum().transpose();
}

std::vector<JumpEvent> DriverPath::events_for(int k) const {
  std::vector<JumpEvent> out;
  for (const auto& e : events) {
    if (e.coordinate == k) out.push_back(e);
  }
  return out;
}

double DriverPath::jump_value(int k, double t) const {
  if (k < 0 || k >= q()) throw StructuralError("DriverPath::jump_value: coordinate out of range");
  double acc = compensator_drift[static_cast<std::size_t>(k)] * t;
  for (const auto& e : events) {
    if (e.coordinate == k && e.time <= t) acc += e.size;
  }
  return acc;
}

DriverPath DriverPath::coarsen(int factor) const {
  if (factor < 1) throw ConfigError("DriverPath::coarsen: factor must be >= 1");
  DriverPath out;
  out.horizon = horizon;
  out.events = events;
  out.compensator_drift = compensator_drift;
  std::vector<int> nodes;
  for (int i = 0; i <= steps(); i += factor) nodes.push_back(i);
  if (nodes.back() != steps()) nodes.push_back(steps());
  out.wiener_increments.resize(static_cast<Eigen::Index>(nodes.size()) - 1, p());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    out.time_grid.push_back(time_grid[static_cast<std::size_t>(nodes[j])]);
    if (j > 0) {
      const int a = nodes[j - 1];
      const int b = nodes[j];
      out.wiener_increments.row(static_cast<Eigen::Index>(j) - 1) =
          wiener_increments.middleRows(a, b - a).colwise().sum();
    }
  }
  return out;
}

std::vector<double> regular_grid(double horizon, double dt) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("time grid: horizon must be positive");
  if (!(dt > 0.0) || dt > horizon * (1.0 + 1e-12)) throw ConfigError("time grid: need 0 < dt <= horizon");
  const auto steps = static_cast<long>(std::ceil(horizon / dt - 1e-9));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps) + 1);
  for (long i = 0; i < steps; ++i) grid.push_back(static_cast<double>(i) * dt);
  grid.push_back(horizon);
  return grid;
}

DriverPath sample_path(const LevyDriver& driver, double horizon, double dt, std::uint64_t seed) {
  DriverPath path;
  path.horizon = horizon;
  path.time_grid = regular_grid(horizon, dt);
  const int p = driver.p();
  const int steps = path.steps();

  path.wiener_increments.resize(steps, p);
  for (int j = 0; j < p; ++j) {
    Engine engine = make_engine(seed, static_cast<std::uint64_t>(j));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < steps; ++i) {
      const double h = path.time_grid[static_cast<std::size_t>(i) + 1] - path.time_grid[static_cast<std::size_t>(i)];
      path.wiener_increments(i, j) = std::sqrt(h) * gauss(engine);
    }
  }

  for (int k = 0; k < driver.q(); ++k) {
    const auto& spec = driver.jump(k);
    path.compensator_drift.push_back(driver.compensator_rate(k));
    Engine engine = make_engine(seed, 1000 + static_cast<std::uint64_t>(k));
    std::poisson_distribution<long> count(spec.intensity() * horizon);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const long n = count(engine);
    for (long i = 0; i < n; ++i) {
      const double t = horizon * (1.0 - unit(engine));
      path.events.push_back(JumpEvent{t, k, spec.sample(engine), Eigen::VectorXd::Zero(p)});
    }
  }
  std::sort(path.events.begin(), path.events.end(), [](const JumpEvent& a, const JumpEvent& b) {
    return a.time < b.time || (a.time == b.time && a.coordinate < b.coordinate);
  });

  if (p > 0 && !path.events.empty()) {
    Eigen::MatrixXd cumulative = Eigen::MatrixXd::Zero(steps + 1, p);
    for (int i = 0; i < steps; ++i) cumulative.row(i + 1) = cumulative.row(i) + path.wiener_increments.row(i);
    Engine engine = make_engine(seed, 2000);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int cell = 0;
    double t_left = 0.0;
    Eigen::VectorXd w_left = Eigen::VectorXd::Zero(p);
    for (auto& e : path.events) {
      if (path.time_grid[static_cast<std::size_t>(cell) + 1] < e.time) {
        while (cell < steps - 1 && path.time_grid[static_cast<std::size_t>(cell) + 1] < e.time) ++cell;
        t_left = path.time_grid[static_cast<std::size_t>(cell)];
        w_left = cumulative.row(cell).transpose();
      }
      // Brownian bridge from (t_left, w_left) to the right grid node.
      const double t_right = path.time_grid[static_cast<std::size_t>(cell) + 1];
      const Eigen::VectorXd w_right = cumulative.row(cell + 1).transpose();
      const double span = t_right - t_left;
      const double frac = span > 0.0 ? (e.time - t_left) / span : 0.0;
      const double sd = span > 0.0 ? std::sqrt(std::max(0.0, (e.time - t_left) * (t_right - e.time) / span)) : 0.0;
      for (int j = 0; j < p; ++j) e.wiener[j] = w_left[j] + frac * (w_right[j] - w_left[j]) + sd * gauss(engine);
      w_left = e.wiener;
      t_left = e.time;
    }
  }
  return path;
}

}  // namespace levyflat
