#pragma once

#include <stdexcept>
#include <string>

namespace isqp {

/// Base class for every error raised by the solver library.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrix : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Raised by Cholesky when a diagonal pivot falls to or below the floor.
class NotPositiveDefinite : public SolverError {
 public:
  using SolverError::SolverError;
};

/// An evaluator returned a non-finite value.
class EvaluationFailure : public SolverError {
 public:
  using SolverError::SolverError;
};

/// The active constraint gradients are linearly dependent at the current point.
class DegenerateConstraints : public SolverError {
 public:
  using SolverError::SolverError;
};

class MaxQpIterations : public SolverError {
 public:
  using SolverError::SolverError;
};

class NumericalBreakdown : public SolverError {
 public:
  using SolverError::SolverError;
};

class CertificateViolation : public SolverError {
 public:
  using SolverError::SolverError;
};

class LineSearchStall : public SolverError {
 public:
  using SolverError::SolverError;
};

class UnknownProblem : public SolverError {
 public:
  using SolverError::SolverError;
};

class GradientMismatch : public SolverError {
 public:
  GradientMismatch(const std::string& what, int component)
      : SolverError(what), component_(component) {}

  /// -1 for the objective, otherwise the constraint index.
  int component() const noexcept { return component_; }

 private:
  int component_;
};

class InconsistentRecords : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace isqp
