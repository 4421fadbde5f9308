#pragma once

#include <stdexcept>
#include <string>

namespace susyqm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function (e.g. m >= 1 for K(m)).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Evaluation at, or within tolerance of, a pole.
class PoleError : public Error {
public:
  using Error::Error;
};

/// Malformed input: mismatched grids, non-finite samples, bad configs.
class InputError : public Error {
public:
  using Error::Error;
};

/// An iterative routine failed to converge.
class NumericError : public Error {
public:
  using Error::Error;
};

/// A result violated an internal consistency check (e.g. a partner
/// potential with a non-negligible imaginary part).
class ConsistencyError : public Error {
public:
  using Error::Error;
};

/// The seed is degenerate (factorization energy at a band edge).
class DegenerateSeedError : public Error {
public:
  using Error::Error;
};

/// w(x) = D + W(u1, du1/deps) vanishes: the transformation is singular.
class SingularTransformError : public Error {
public:
  SingularTransformError(const std::string& what, double location)
      : Error(what), location_(location) {}

  /// Abscissa of the zero of w.
  double location() const noexcept { return location_; }

private:
  double location_;
};

}  // namespace susyqm
