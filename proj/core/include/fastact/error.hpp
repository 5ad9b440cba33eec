#pragma once

#include <stdexcept>
#include <string>

namespace fastact {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters: bad fast-exp order, empty range, unknown name, ...
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A denominator evaluated to exactly zero.
class EvaluationSingularity : public Error {
 public:
  explicit EvaluationSingularity(double x)
      : Error("evaluation singularity at x = " + std::to_string(x)), x_(x) {}
  double x() const noexcept { return x_; }

 private:
  double x_;
};

/// Least-squares system is rank deficient.
class FitFailure : public Error {
 public:
  FitFailure(const std::string& what, double condition_estimate)
      : Error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

/// A fitted rational has a denominator root inside the fit range.
class PoleInRange : public Error {
 public:
  explicit PoleInRange(double location)
      : Error("denominator changes sign near x = " + std::to_string(location)),
        location_(location) {}
  double location() const noexcept { return location_; }

 private:
  double location_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent dataset files.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace fastact
