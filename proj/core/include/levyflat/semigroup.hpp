#pragma once

// Pseudo-contractive semigroups on a GridSpace: the identity, the matrix
// exponential of a generator, and the interpolating shift v -> v(. + t).

#include "levyflat/hilbert.hpp"

#include <memory>

namespace levyflat {

class Semigroup {
 public:
  enum class Kind { Identity, MatrixGenerator, ShiftInterpolating };

  static Semigroup identity(SpacePtr space);
  /// S_t = exp(t A). Checks |S_t v| <= e^{beta t}|v| and S_{t+s} = S_t S_s
  /// to 1e-8 at construction (NumericError otherwise); beta is the
  /// logarithmic norm of A in the weighted geometry.
  static Semigroup matrix_generator(SpacePtr space, Eigen::MatrixXd generator);
  /// (S_t v)(xi) = v(xi + t) through a MonotoneCubic interpolant of v, held
  /// constant beyond the last node. beta and the semigroup-law defect are
  /// measured at construction.
  static Semigroup shift(SpacePtr space);

  Kind kind() const;
  const SpacePtr& space() const;
  double beta() const;
  /// Largest relative |S_{t+s} v - S_t S_s v| seen at construction on smooth probes.
  double semigroup_defect() const;
  const Eigen::MatrixXd& generator() const;

  /// Throws DomainError for t < 0.
  HVector apply(double t, const HVector& v) const;
  /// int_0^t S_u v du.
  HVector integrate_orbit(double t, const HVector& v) const;

 private:
  struct Impl;
  explicit Semigroup(std::shared_ptr<Impl> impl);
  std::shared_ptr<Impl> impl_;
};

HVector apply_semigroup(const Semigroup& s, double t, const HVector& v);

const char* to_string(Semigroup::Kind kind);

}  // namespace levyflat
