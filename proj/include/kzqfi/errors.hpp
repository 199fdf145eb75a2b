#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kzqfi {

/// Error taxonomy shared by all modules. The CLI maps these onto exit codes:
/// usage/argument errors -> 2, numerical failures -> 3, truncation budget -> 4,
/// engine capacity -> 5.
class InvalidArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed numeric input: NaN/Inf data, non-Hermitian generator,
/// non-unitary gate, non-positive values where positives are required.
class InvalidInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical breakdown at runtime (step-size underflow, singular fit,
/// non-finite amplitudes).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative solver ran out of sweeps/iterations. Carries the energy trace
/// so the caller can inspect how far it got.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& msg, std::vector<double> trace)
      : NumericalError(msg), energy_trace(std::move(trace)) {}

  std::vector<double> energy_trace;
};

/// Fewer data points than the fit requires.
class InsufficientDataError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

/// Degenerate regression design (e.g. all abscissae equal).
class SingularFitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Cumulative truncation error exceeded the configured budget.
class BudgetExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Request exceeds an engine's hard capacity (e.g. dense state vector
/// beyond 12 sites).
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kzqfi
