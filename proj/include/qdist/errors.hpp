#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qdist {

/// Bad input: malformed files, inconsistent grids, violated preconditions.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that could not produce a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// P-IRLS hit its iteration cap. Carries the last iterate.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, std::vector<double> iterate)
      : NumericalError(what), iterate_(std::move(iterate)) {}

  const std::vector<double>& iterate() const noexcept { return iterate_; }

 private:
  std::vector<double> iterate_;
};

/// Logistic fit whose linear predictor diverges.
class SeparationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace qdist
