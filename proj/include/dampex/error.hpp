#pragma once

#include <stdexcept>
#include <string>

namespace dampex {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An adaptive rule ran out of subdivisions before reaching its tolerance.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved_error, double value)
      : Error(what), achieved_error_(achieved_error), value_(value) {}

  double achieved_error() const noexcept { return achieved_error_; }
  double value() const noexcept { return value_; }

 private:
  double achieved_error_;
  double value_;
};

/// Evaluation requested at (or numerically on) the sphere |xi| = 1 with a
/// formula that divides by 1 - |xi|^2.
class SingularEvaluationError : public Error {
 public:
  SingularEvaluationError(const std::string& what, double radius)
      : Error(what), radius_(radius) {}

  double radius() const noexcept { return radius_; }

 private:
  double radius_;
};

class InsufficientOrderError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Raised when an experiment needs a nonzero lower-bound constant and the
/// data make it vanish.
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace dampex
