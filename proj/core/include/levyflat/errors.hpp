#pragma once

#include <stdexcept>
#include <string>

namespace levyflat {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible shapes or spaces (dimension mismatch, foreign grid).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Invalid user-supplied configuration or parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, failed quadrature, violated numerical invariants.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a mapping (e.g. negative semigroup time).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A chart whose Jacobian is not injective at the requested coordinates.
class DegenerateChartError : public Error {
 public:
  using Error::Error;
};

}  // namespace levyflat
