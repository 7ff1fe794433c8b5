#pragma once

#include <stdexcept>

namespace lqt {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Argument outside the operation's domain (e.g. a signal sampled outside [0, T]).
class DomainError : public Error {
  public:
    using Error::Error;
};

// Cost weight that violates definiteness (R = 0, Q < 0, ...).
class InvalidWeightError : public Error {
  public:
    using Error::Error;
};

// Inconsistent matrix / vector / grid sizes.
class DimensionError : public Error {
  public:
    using Error::Error;
};

// Parameter combination the closed-form solution does not cover.
class UnsupportedCaseError : public Error {
  public:
    using Error::Error;
};

// Closed-form denominator vanishes at the requested time.
class PoleError : public Error {
  public:
    using Error::Error;
};

// Percentage error requested against a non-positive baseline cost.
class UndefinedBaselineError : public Error {
  public:
    using Error::Error;
};

// Malformed user input: grids, experiment lists, config files.
class ValidationError : public Error {
  public:
    using Error::Error;
};

} // namespace lqt
