#pragma once

#include <stdexcept>
#include <string>

namespace adacubic {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid hyperparameters, dimension mismatches, malformed config files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An objective (or a finite-difference probe of one) produced a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Hessian-vector products returned non-finite entries during diagonal estimation.
class CurvatureError : public Error {
 public:
  using Error::Error;
};

/// The actual-to-predicted ratio could not be formed (NaN).
class ModelDegeneracyError : public Error {
 public:
  using Error::Error;
};

/// A shifted diagonal B + sigma*I had a non-positive entry.
class ShiftNotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

/// The secular function was requested at a zero step.
class ZeroStepError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

/// Internal consistency check failed; indicates a bug, not bad input.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace adacubic
