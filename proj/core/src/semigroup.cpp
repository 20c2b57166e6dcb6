#include "levyflat/semigroup.hpp"

#include "levyflat/errors.hpp"
#include "levyflat/interpolation.hpp"
#include "levyflat/random.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace levyflat {

struct Semigroup::Impl {
  Kind kind = Kind::Identity;
  SpacePtr space;
  double beta = 0.0;
  double defect = 0.0;
  Eigen::MatrixXd generator;

  mutable std::mutex cache_mutex;
  mutable std::map<double, Eigen::MatrixXd> cache;

  Eigen::MatrixXd exponential(double t) const {
    {
      std::lock_guard<std::mutex> lock(cache_mutex);
      const auto it = cache.find(t);
      if (it != cache.end()) return it->second;
    }
    Eigen::MatrixXd e = (t * generator).exp();
    std::lock_guard<std::mutex> lock(cache_mutex);
    if (cache.size() >= 64) cache.clear();
    cache.emplace(t, e);
    return e;
  }

  Eigen::VectorXd shifted(double t, const Eigen::VectorXd& v) const {
    const Eigen::VectorXd& x = space->points();
    const MonotoneCubic interp(x, v, true);
    Eigen::VectorXd out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = interp(x[i] + t);
    return out;
  }
};

Semigroup::Semigroup(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}

namespace {

const double kSampleTimes[] = {0.1, 0.5, 1.0};

double weighted_norm(const SpacePtr& space, const Eigen::VectorXd& v) {
  return space->sqrt_weights().cwiseProduct(v).norm();
}

std::vector<Eigen::VectorXd> random_probes(int n, int count, std::uint64_t seed) {
  Engine engine(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Eigen::VectorXd> out;
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = gauss(engine);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

Semigroup Semigroup::identity(SpacePtr space) {
  if (!space) throw ConfigError("Semigroup: null space");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Identity;
  impl->space = std::move(space);
  return Semigroup(std::move(impl));
}

Semigroup Semigroup::matrix_generator(SpacePtr space, Eigen::MatrixXd generator) {
  if (!space) throw ConfigError("Semigroup: null space");
  const int n = space->dim();
  if (generator.rows() != n || generator.cols() != n) throw StructuralError("Semigroup: generator must be n x n");
  if (!generator.allFinite()) throw ConfigError("Semigroup: generator has non-finite entries");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::MatrixGenerator;
  impl->space = space;
  impl->generator = std::move(generator);

  const Eigen::VectorXd& sw = space->sqrt_weights();
  const Eigen::MatrixXd scaled = sw.asDiagonal() * impl->generator * sw.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd sym = 0.5 * (scaled + scaled.transpose());
  impl->beta = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();

  for (double t : kSampleTimes) {
    const Eigen::MatrixXd e = impl->exponential(t);
    for (const auto& v : random_probes(n, 50, 0x5eed0001)) {
      const double lhs = weighted_norm(space, e * v);
      const double rhs = std::exp(impl->beta * t) * weighted_norm(space, v);
      if (lhs > rhs * (1.0 + 1e-8) + 1e-300) {
        throw NumericError("Semigroup: pseudo-contractivity bound violated");
      }
    }
  }
  const double pairs[][2] = {{0.1, 0.5}, {0.5, 1.0}, {0.3, 0.7}};
  for (const auto& pr : pairs) {
    const Eigen::MatrixXd lhs = impl->exponential(pr[0] + pr[1]);
    const Eigen::MatrixXd rhs = impl->exponential(pr[0]) * impl->exponential(pr[1]);
    const double rel = (lhs - rhs).norm() / std::max(1.0, lhs.norm());
    impl->defect = std::max(impl->defect, rel);
  }
  if (impl->defect > 1e-8) {
    std::ostringstream os;
    os << "Semigroup: semigroup law violated (relative defect " << impl->defect << ")";
    throw NumericError(os.str());
  }
  return Semigroup(std::move(impl));
}

Semigroup Semigroup::shift(SpacePtr space) {
  if (!space) throw ConfigError("Semigroup: null space");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::ShiftInterpolating;
  impl->space = space;
  const int n = space->dim();
  const Eigen::VectorXd& x = space->points();

  double beta = 0.0;
  const auto probes = random_probes(n, 200, 0x5eed0002);
  for (double t : {0.05, 0.1, 0.25, 0.5, 1.0}) {
    // Unit vectors first: the flat extrapolation amplifies the last node most.
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd e = Eigen::VectorXd::Unit(n, i);
      beta = std::max(beta, std::log(weighted_norm(space, impl->shifted(t, e)) / weighted_norm(space, e)) / t);
    }
    for (const auto& v : probes) {
      beta = std::max(beta, std::log(weighted_norm(space, impl->shifted(t, v)) / weighted_norm(space, v)) / t);
    }
  }
  impl->beta = beta;

  const double a = x[0];
  const double len = x[n - 1] - x[0];
  std::vector<Eigen::VectorXd> smooth;
  for (auto f : {+[](double u) { return std::exp(-u); }, +[](double u) { return std::cos(3.0 * u); },
                 +[](double u) { return u * std::exp(-2.0 * u); }}) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = f((x[i] - a) / len * 2.0);
    smooth.push_back(std::move(v));
  }
  const double pairs[][2] = {{0.1, 0.2}, {0.25, 0.5}, {0.5, 1.0}};
  for (const auto& v : smooth) {
    for (const auto& pr : pairs) {
      const Eigen::VectorXd lhs = impl->shifted(pr[0] + pr[1], v);
      const Eigen::VectorXd rhs = impl->shifted(pr[0], impl->shifted(pr[1], v));
      impl->defect = std::max(impl->defect, weighted_norm(space, lhs - rhs) / weighted_norm(space, v));
    }
  }
  return Semigroup(std::move(impl));
}

Semigroup::Kind Semigroup::kind() const { return impl_->kind; }
const SpacePtr& Semigroup::space() const { return impl_->space; }
double Semigroup::beta() const { return impl_->beta; }
double Semigroup::semigroup_defect() const { return impl_->defect; }
const Eigen::MatrixXd& Semigroup::generator() const { return impl_->generator; }

HVector Semigroup::apply(double t, const HVector& v) const {
  require_same_space(impl_->space, v.space(), "Semigroup::apply");
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("Semigroup::apply: t must be finite and >= 0");
  if (t == 0.0) return v;
  switch (impl_->kind) {
    case Kind::Identity:
      return v;
    case Kind::MatrixGenerator:
      return HVector(v.space(), Eigen::VectorXd(impl_->exponential(t) * v.coeffs()));
    case Kind::ShiftInterpolating:
      return HVector(v.space(), impl_->shifted(t, v.coeffs()));
  }
  return v;
}

HVector Semigroup::integrate_orbit(double t, const HVector& v) const {
  require_same_space(impl_->space, v.space(), "Semigroup::integrate_orbit");
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("Semigroup::integrate_orbit: t must be finite and >= 0");
  switch (impl_->kind) {
    case Kind::Identity:
      return t * v;
    case Kind::MatrixGenerator: {
      const Eigen::Index n = v.size();
      Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
      aug.topLeftCorner(n, n) = impl_->generator;
      aug.topRightCorner(n, 1) = v.coeffs();
      const Eigen::MatrixXd e = (t * aug).exp();
      return HVector(v.space(), Eigen::VectorXd(e.topRightCorner(n, 1)));
    }
    case Kind::ShiftInterpolating: {
      const Eigen::VectorXd& x = impl_->space->points();
      const MonotoneCubic interp(x, v.coeffs(), true);
      Eigen::VectorXd out(x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = interp.integral(x[i], x[i] + t);
      return HVector(v.space(), std::move(out));
    }
  }
  return v;
}

HVector apply_semigroup(const Semigroup& s, double t, const HVector& v) { return s.apply(t, v); }

const char* to_string(Semigroup::Kind kind) {
  switch (kind) {
    case Semigroup::Kind::Identity:
      return "Identity";
    case Semigroup::Kind::MatrixGenerator:
      return "MatrixGenerator";
    case Semigroup::Kind::ShiftInterpolating:
      return "ShiftInterpolating";
  }
  return "Identity";
}

}  // namespace levyflat
