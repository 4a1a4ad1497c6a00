#pragma once

#include <stdexcept>
#include <string>

namespace groupcover {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed or unusable input data (CSV rows, JSON scenarios, group layout).
class DataError : public Error {
 public:
  using Error::Error;
};

// Root finding was asked to work on a bracket with no sign change.
class BracketError : public Error {
 public:
  using Error::Error;
};

// Iteration budget exhausted before the tolerance was met. Carries the best
// iterate seen so the caller can decide whether it is usable.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_iterate)
      : Error(what), best_iterate_(best_iterate) {}
  double best_iterate() const noexcept { return best_iterate_; }

 private:
  double best_iterate_;
};

// An objective or estimator produced a non-finite value.
class EvalError : public Error {
 public:
  using Error::Error;
};

// Test inversion found no accepted parameter value.
class InversionError : public Error {
 public:
  using Error::Error;
};

// Non-fatal diagnostics (degenerate bootstrap, non-contiguous acceptance set,
// ...). The default handler writes "warning: <message>" to stderr; tests and
// embedding applications may install their own. Passing nullptr restores the
// default.
using WarningHandler = void (*)(const std::string& message);

void set_warning_handler(WarningHandler handler) noexcept;
void warn(const std::string& message);

}  // namespace groupcover
