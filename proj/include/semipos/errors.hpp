#pragma once

#include <stdexcept>
#include <string>

namespace semipos {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A polynomial whose leading coefficient vanishes.
class DegreeError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Violated structural precondition (asymmetric matrix, bad sizes).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An iterative or refinement scheme did not settle within its cap.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last, double previous)
      : std::runtime_error(what), last_(last), previous_(previous) {}
  double last() const { return last_; }
  double previous() const { return previous_; }

 private:
  double last_;
  double previous_;
};

/// Root iteration failure; carries the worst scaled residual.
class IterationError : public std::runtime_error {
 public:
  IterationError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Value not representable even in log form.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Spectral window endpoint too close to an eigenvalue.
class IllConditionedWindow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too few samples for a fit or statistic.
class SampleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Too many failed trials in a Monte Carlo run.
class DataQualityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Request outside the supported model family.
class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two independent computations of the same quantity disagree.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace semipos
