#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "isqp/linalg.hpp"

namespace isqp {

using ScalarFn = std::function<double(std::span<const double>)>;
using VectorFn = std::function<Vector(std::span<const double>)>;
using MatrixFn = std::function<Matrix(std::span<const double>)>;

/// Nonlinear program
///
///   min f0(x)  s.t.  f_i(x) <= 0 (i < m_ineq),  f_i(x) = 0 (m_ineq <= i < m).
///
/// Constraint values are returned as one vector, inequality block first.
/// `grad_f` returns an n×m matrix whose columns are the constraint gradients.
/// Either gradient evaluator may be left empty, in which case central
/// differences are used.
struct NlpProblem {
  std::string name;
  int n = 0;
  int m_ineq = 0;
  int m_eq = 0;
  ScalarFn f0;
  VectorFn f;
  VectorFn grad_f0;
  MatrixFn grad_f;

  int m() const noexcept { return m_ineq + m_eq; }
  bool is_equality(int i) const noexcept { return i >= m_ineq; }
};

/// Evaluation counters. `nf0` counts objective evaluations, `nf` counts
/// individual constraint-function evaluations (m per full evaluation).
struct EvalCounters {
  long nf0 = 0;
  long nf = 0;
};

/// Everything the solver needs to know about a point.
struct Evaluation {
  Vector x;
  int m_ineq = 0;
  double f0 = 0.0;
  Vector fI;
  Vector g0;
  Matrix gI;  // n×m, columns are constraint gradients
  double phi = 0.0;
  Vector fbar;
  std::vector<int> iplus;
  std::vector<int> iminus;
  std::vector<int> izero;

  int n() const noexcept { return static_cast<int>(x.size()); }
  int m() const noexcept { return static_cast<int>(fI.size()); }
  int m_eq() const noexcept { return m() - m_ineq; }
};

/// Objective and constraint values only, as produced by a line-search trial.
struct PointValues {
  Vector x;
  double f0 = 0.0;
  Vector fI;
};

/// c_k together with the parameters of its update rule.
struct PenaltyContext {
  double c = 0.5;
  double gamma = 1.0;
  double gamma0 = 2.0;
  double p = 2.0;
};

/// Component selector for fd_gradient.
struct FunctionIndex {
  static constexpr int kObjective = -1;
  int value = kObjective;
};

/// φ = max{0, f_i}.
double constraint_violation(std::span<const double> fI);
/// |I⁻|, the number of constraints with f_i <= 0.
int count_satisfied(std::span<const double> fI);

/// Evaluates values and gradients at x.
Evaluation evaluate(const NlpProblem& problem, std::span<const double> x,
                    EvalCounters& counters);

/// Objective and constraint values at x: nf0 += 1, nf += m.
PointValues evaluate_values(const NlpProblem& problem, std::span<const double> x,
                            EvalCounters& counters);

/// Constraint values at x: nf += m.
Vector evaluate_constraints(const NlpProblem& problem, std::span<const double> x,
                            EvalCounters& counters);

/// Builds a full Evaluation at an already-valued point; only gradients are
/// computed here.
Evaluation complete_evaluation(const NlpProblem& problem, PointValues values,
                               EvalCounters& counters);

/// F_c = f0 − c·Σ_{i∈I₂} f_i.
double penalty_value(const Evaluation& ev, double c);
double penalty_value(double f0, std::span<const double> fI, int m_ineq, double c);

/// ∇F_c = g0 − c·Σ_{i∈I₂} g_i.
Vector penalty_gradient(const Evaluation& ev, double c);

/// Multiplier estimate π = −(NᵀN + D)⁻¹Nᵀg0 with D_i = |f̄_i|^p on the
/// inequality block and zero on the equality block. Throws
/// DegenerateConstraints when the system is not positive definite.
Vector compute_pi(const Evaluation& ev, double p);

/// Penalty update from the equality block of π: s = max|π_i| + γ₀; c grows
/// to max{s, c + γ} when s exceeds it. An empty block leaves c unchanged.
double update_c(const PenaltyContext& ctx, std::span<const double> pi_eq);

/// Central-difference gradient of the objective (component = -1) or of
/// constraint `component`.
Vector fd_gradient(const NlpProblem& problem, std::span<const double> x, FunctionIndex component,
                   EvalCounters& counters);

/// Infinity-norm KKT residual for the original problem with multipliers μ.
double kkt_residual_original(const Evaluation& ev, std::span<const double> mu);

}  // namespace isqp
