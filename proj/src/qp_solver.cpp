#include "isqp/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "isqp/errors.hpp"

namespace isqp {

namespace {

struct EqualityQpSolution {
  Vector d;
  Vector lambda;  // one entry per working-set member
};

// Solves min grad·d + ½dᵀHd s.t. A_W d = rhs_w via the full KKT matrix.
EqualityQpSolution solve_equality_qp(const QpInstance& inst, const std::vector<int>& working,
                                     std::span<const double> grad, std::span<const double> rhs_w) {
  const int n = inst.n();
  const int w = static_cast<int>(working.size());
  Matrix kkt(n + w, n + w);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) kkt(i, j) = inst.H(i, j);
  for (int k = 0; k < w; ++k)
    for (int j = 0; j < n; ++j) {
      kkt(n + k, j) = inst.A(working[k], j);
      kkt(j, n + k) = inst.A(working[k], j);
    }
  Vector rhs(n + w);
  for (int i = 0; i < n; ++i) rhs[i] = -grad[i];
  for (int k = 0; k < w; ++k) rhs[n + k] = rhs_w[k];

  Vector sol;
  try {
    sol = lu_solve(kkt, rhs);
  } catch (const SingularMatrix& e) {
    throw NumericalBreakdown(fmt::format("QP working-set system is singular: {}", e.what()));
  }
  EqualityQpSolution out;
  out.d.assign(sol.begin(), sol.begin() + n);
  out.lambda.assign(sol.begin() + n, sol.end());
  return out;
}

double objective(const QpInstance& inst, std::span<const double> d) {
  const Vector hd = inst.H * d;
  return dot(inst.grad, d) + 0.5 * dot(d, hd);
}

}  // namespace

double qp_kkt_tolerance(const QpInstance& inst) {
  return 1e-9 * std::max(1.0, norm_inf(inst.grad));
}

double qp_active_tolerance(const QpInstance& inst) {
  return inst.active_tol * std::max(1.0, norm_inf(inst.b));
}

QpSolution solve_qp(const QpInstance& inst) {
  const int n = inst.n();
  const int m = inst.m();
  const int max_iter = 50 * (n + m);
  const int bland_after = 10 * (n + m);
  const double dual_tol = 1e-12 * std::max(1.0, norm_inf(inst.grad));

  std::vector<double> row_norm(m);
  for (int i = 0; i < m; ++i) row_norm[i] = norm2(inst.A.row(i));

  Vector d(n, 0.0);
  std::vector<int> working;
  std::vector<bool> in_working(m, false);
  double best_objective = 0.0;
  int stalled = 0;
  bool bland = false;

  QpSolution result;
  for (int iter = 0;; ++iter) {
    if (iter >= max_iter)
      throw MaxQpIterations(fmt::format("active-set QP did not finish in {} iterations", max_iter));
    result.iterations = iter + 1;

    // Step p from d toward the minimizer on the current working set.
    Vector shifted_grad = inst.H * d;
    axpy(1.0, inst.grad, shifted_grad);
    const Vector zeros(working.size(), 0.0);
    EqualityQpSolution eq = solve_equality_qp(inst, working, shifted_grad, zeros);
    const Vector& p = eq.d;

    if (norm_inf(p) <= 1e-12 * std::max(1.0, norm_inf(d))) {
      int leave = -1;
      double most_negative = -dual_tol;
      for (std::size_t k = 0; k < working.size(); ++k) {
        if (eq.lambda[k] >= -dual_tol) continue;
        if (bland) {
          if (leave < 0 || working[k] < working[leave]) leave = static_cast<int>(k);
        } else if (eq.lambda[k] < most_negative) {
          most_negative = eq.lambda[k];
          leave = static_cast<int>(k);
        }
      }
      if (leave < 0) break;
      in_working[working[leave]] = false;
      working.erase(working.begin() + leave);
    } else {
      double step = 1.0;
      int blocking = -1;
      const double pnorm = norm2(p);
      for (int i = 0; i < m; ++i) {
        if (in_working[i]) continue;
        const double ap = dot(inst.A.row(i), p);
        if (ap <= 1e-11 * row_norm[i] * pnorm) continue;
        const double slack = std::max(0.0, inst.b[i] - dot(inst.A.row(i), d));
        const double ratio = slack / ap;
        if (ratio < step) {
          step = ratio;
          blocking = i;
        }
      }
      axpy(step, p, d);
      if (blocking >= 0) {
        working.push_back(blocking);
        in_working[blocking] = true;
      }
    }

    const double obj = objective(inst, d);
    if (obj < best_objective - 1e-15 * std::max(1.0, std::abs(best_objective))) {
      best_objective = obj;
      stalled = 0;
    } else if (++stalled >= bland_after) {
      bland = true;
    }
  }

  // Re-solve on the final working set for an accurate (d, λ).
  Vector b_w(working.size());
  for (std::size_t k = 0; k < working.size(); ++k) b_w[k] = inst.b[working[k]];
  const EqualityQpSolution final_eq = solve_equality_qp(inst, working, inst.grad, b_w);

  result.d0 = final_eq.d;
  result.lambda.assign(m, 0.0);
  for (std::size_t k = 0; k < working.size(); ++k) result.lambda[working[k]] = final_eq.lambda[k];

  const double active_tol = qp_active_tolerance(inst);
  for (int i = 0; i < m; ++i)
    if (inst.b[i] - dot(inst.A.row(i), result.d0) <= active_tol) result.active.push_back(i);

  const double violation = qp_kkt_violation(inst, result);
  if (violation > qp_kkt_tolerance(inst))
    throw NumericalBreakdown(fmt::format("QP solution fails KKT certificate: violation {:.3e}",
                                         violation));
  return result;
}

double qp_kkt_violation(const QpInstance& inst, const QpSolution& sol) {
  Vector stationarity = inst.H * sol.d0;
  axpy(1.0, inst.grad, stationarity);
  axpy(1.0, transpose_times(inst.A, sol.lambda), stationarity);
  double v = norm_inf(stationarity);
  for (int i = 0; i < inst.m(); ++i) {
    const double gap = dot(inst.A.row(i), sol.d0) - inst.b[i];
    v = std::max(v, gap);
    v = std::max(v, -sol.lambda[i]);
    v = std::max(v, std::abs(sol.lambda[i] * gap));
  }
  return v;
}

double objective_decrease_certificate(const QpInstance& inst, const QpSolution& sol) {
  const double slope = dot(inst.grad, sol.d0);
  const double value = slope + 0.5 * dot(sol.d0, inst.H * sol.d0);
  if (value > qp_kkt_tolerance(inst))
    throw CertificateViolation(
        fmt::format("QP objective {:.6e} at d0 exceeds the value 0 at d = 0", value));
  return slope;
}

}  // namespace isqp
