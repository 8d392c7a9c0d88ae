#pragma once

#include <stdexcept>

namespace infoflow {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model violates one of its construction invariants.
class InvalidModel : public Error {
 public:
  using Error::Error;
};

/// A time interval or argument range is inverted or out of bounds.
class BadInterval : public Error {
 public:
  using Error::Error;
};

/// Evaluation requested at t >= T, where the conditional formulas degenerate.
class TimeAtOrPastHorizon : public Error {
 public:
  using Error::Error;
};

/// The effective-rate expression is negative under the given correlations.
class NegativeEffectiveRate : public Error {
 public:
  using Error::Error;
};

/// Strike lies outside the attainable bond-price interval.
class StrikeOutOfRange : public Error {
 public:
  using Error::Error;
};

/// An operation requiring strictly positive flow rates was given one <= 0.
class NonPositiveFlowRate : public Error {
 public:
  using Error::Error;
};

/// Calibration target lies outside the range the model can produce.
class TargetOutOfRange : public Error {
 public:
  using Error::Error;
};

/// An iterative solver exhausted its iteration budget.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature could not meet its tolerance within the depth limit.
class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

/// A statistic was requested from fewer samples than its contract allows.
class TooFewPaths : public Error {
 public:
  using Error::Error;
};

/// A statistic is undefined because the sample has zero variance.
class DegenerateSample : public Error {
 public:
  using Error::Error;
};

/// Path data is inconsistent with the model/scenario it claims to come from.
class PathModelMismatch : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration is missing, malformed, or self-contradictory.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace infoflow
