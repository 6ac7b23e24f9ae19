#pragma once

#include <vector>

#include "isqp/linalg.hpp"

namespace isqp {

/// Strictly convex inequality-constrained QP
///
///   min grad·d + ½ dᵀHd  s.t.  A d <= b,
///
/// with b >= 0 so that d = 0 is always feasible.
struct QpInstance {
  Matrix H;
  Vector grad;
  Matrix A;  // m×n
  Vector b;
  double active_tol = 1e-8;  // relative to max(1, ‖b‖∞)

  int n() const noexcept { return static_cast<int>(grad.size()); }
  int m() const noexcept { return static_cast<int>(b.size()); }
};

struct QpSolution {
  Vector d0;
  Vector lambda;            // zero outside the final working set
  std::vector<int> active;  // {i : b_i − A_i·d0 <= active_tol}
  int iterations = 0;
};

/// 1e-9·max(1, ‖grad‖∞).
double qp_kkt_tolerance(const QpInstance& inst);
/// active_tol·max(1, ‖b‖∞).
double qp_active_tolerance(const QpInstance& inst);

/// Primal active-set method started from d = 0. Throws MaxQpIterations after
/// 50·(n+m) iterations and NumericalBreakdown when the final point fails the
/// KKT certificate.
QpSolution solve_qp(const QpInstance& inst);

/// Largest violation of the KKT conditions of `inst` at `sol`.
double qp_kkt_violation(const QpInstance& inst, const QpSolution& sol);

/// Returns grad·d0 after checking grad·d0 + ½ d0ᵀHd0 <= kkt tolerance;
/// throws CertificateViolation otherwise.
double objective_decrease_certificate(const QpInstance& inst, const QpSolution& sol);

}  // namespace isqp
