#pragma once

#include <stdexcept>
#include <string>

namespace frontier {

// Two families of failures. DomainError: the inputs violate a model
// precondition (exit code 1). NumericalError: the discretization or an
// iterative method failed (exit code 2).
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NoCriticalLength : public DomainError {
public:
  using DomainError::DomainError;
};

class NoThreshold : public DomainError {
public:
  using DomainError::DomainError;
};

class InvalidBracket : public DomainError {
public:
  using DomainError::DomainError;
};

/// Negative density below -1e-12: the step size broke positivity.
class StabilityViolation : public NumericalError {
public:
  StabilityViolation(const std::string& what, double time)
      : NumericalError(what), time_(time) {}
  double time() const { return time_; }

private:
  double time_;
};

/// A front came within one kernel radius of the computational window edge.
class WindowExit : public NumericalError {
public:
  WindowExit(const std::string& what, double time)
      : NumericalError(what), time_(time) {}
  double time() const { return time_; }

private:
  double time_;
};

class NoConvergence : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NoContraction : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NotConverged : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class BracketFailure : public NumericalError {
public:
  using NumericalError::NumericalError;
};

}  // namespace frontier
