#pragma once

#include <stdexcept>
#include <string>

namespace normsol {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates its domain; the message names the inequality.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The requested operation does not apply to the regime of the parameters.
class RegimeError : public Error {
 public:
  using Error::Error;
};

/// An input computed by another stage (typically an extremal) is unusable.
class DependencyError : public Error {
 public:
  using Error::Error;
};

/// Shooting could not bracket the centre amplitude.
class ShootingError : public Error {
 public:
  using Error::Error;
};

/// The truncation radius is too small for the profile to decay.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// The grid cannot resolve the requested feature.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// The self-consistent normalisation of W_{p,q} failed.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// Fiber coefficients are degenerate (no interior maximiser).
class DegenerateFiberError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace normsol
