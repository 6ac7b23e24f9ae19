#include "isqp/nlp_model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "isqp/errors.hpp"

namespace isqp {

namespace {

double fd_step(double xj) { return 1e-6 * std::max(1.0, std::abs(xj)); }

void require_finite(std::span<const double> values, const std::string& problem,
                    const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i]))
      throw EvaluationFailure(
          fmt::format("{}: non-finite {} (entry {} = {})", problem, what, i, values[i]));
}

double checked_f0(const NlpProblem& problem, std::span<const double> x, EvalCounters& counters) {
  const double v = problem.f0(x);
  ++counters.nf0;
  if (!std::isfinite(v))
    throw EvaluationFailure(fmt::format("{}: non-finite objective {}", problem.name, v));
  return v;
}

Vector checked_f(const NlpProblem& problem, std::span<const double> x, EvalCounters& counters) {
  if (problem.m() == 0) return {};
  Vector v = problem.f(x);
  counters.nf += problem.m();
  if (static_cast<int>(v.size()) != problem.m())
    throw EvaluationFailure(fmt::format("{}: constraint evaluator returned {} values, expected {}",
                                        problem.name, v.size(), problem.m()));
  require_finite(v, problem.name, "constraint value");
  return v;
}

Matrix fd_jacobian(const NlpProblem& problem, std::span<const double> x, EvalCounters& counters) {
  const int n = problem.n;
  Matrix jac(n, problem.m());
  Vector probe(x.begin(), x.end());
  for (int j = 0; j < n; ++j) {
    const double h = fd_step(x[j]);
    probe[j] = x[j] + h;
    const Vector up = checked_f(problem, probe, counters);
    probe[j] = x[j] - h;
    const Vector down = checked_f(problem, probe, counters);
    probe[j] = x[j];
    for (int i = 0; i < problem.m(); ++i) jac(j, i) = (up[i] - down[i]) / (2.0 * h);
  }
  return jac;
}

void classify(Evaluation& ev) {
  ev.phi = constraint_violation(ev.fI);
  const int m = ev.m();
  ev.fbar.assign(m, 0.0);
  ev.iplus.clear();
  ev.iminus.clear();
  ev.izero.clear();
  for (int i = 0; i < m; ++i) {
    if (ev.fI[i] > 0.0) {
      ev.iplus.push_back(i);
      ev.fbar[i] = ev.fI[i] - ev.phi;
    } else {
      ev.iminus.push_back(i);
      ev.fbar[i] = ev.fI[i];
    }
    if (ev.fbar[i] == 0.0) ev.izero.push_back(i);
  }
}

}  // namespace

double constraint_violation(std::span<const double> fI) {
  double phi = 0.0;
  for (double v : fI) phi = std::max(phi, v);
  return phi;
}

int count_satisfied(std::span<const double> fI) {
  return static_cast<int>(std::count_if(fI.begin(), fI.end(), [](double v) { return v <= 0.0; }));
}

PointValues evaluate_values(const NlpProblem& problem, std::span<const double> x,
                            EvalCounters& counters) {
  PointValues pv;
  pv.x.assign(x.begin(), x.end());
  pv.f0 = checked_f0(problem, x, counters);
  pv.fI = checked_f(problem, x, counters);
  return pv;
}

Vector evaluate_constraints(const NlpProblem& problem, std::span<const double> x,
                            EvalCounters& counters) {
  return checked_f(problem, x, counters);
}

Evaluation complete_evaluation(const NlpProblem& problem, PointValues values,
                               EvalCounters& counters) {
  Evaluation ev;
  ev.x = std::move(values.x);
  ev.m_ineq = problem.m_ineq;
  ev.f0 = values.f0;
  ev.fI = std::move(values.fI);

  if (problem.grad_f0) {
    ev.g0 = problem.grad_f0(ev.x);
    if (static_cast<int>(ev.g0.size()) != problem.n)
      throw EvaluationFailure(fmt::format("{}: objective gradient has length {}, expected {}",
                                          problem.name, ev.g0.size(), problem.n));
  } else {
    ev.g0 = fd_gradient(problem, ev.x, FunctionIndex{}, counters);
  }
  require_finite(ev.g0, problem.name, "objective gradient");

  if (problem.m() > 0) {
    if (problem.grad_f) {
      ev.gI = problem.grad_f(ev.x);
      if (static_cast<int>(ev.gI.rows()) != problem.n ||
          static_cast<int>(ev.gI.cols()) != problem.m())
        throw EvaluationFailure(fmt::format("{}: constraint Jacobian is {}x{}, expected {}x{}",
                                            problem.name, ev.gI.rows(), ev.gI.cols(), problem.n,
                                            problem.m()));
    } else {
      ev.gI = fd_jacobian(problem, ev.x, counters);
    }
    require_finite(ev.gI.data(), problem.name, "constraint gradient");
  } else {
    ev.gI = Matrix(problem.n, 0);
  }
  classify(ev);
  return ev;
}

Evaluation evaluate(const NlpProblem& problem, std::span<const double> x,
                    EvalCounters& counters) {
  if (static_cast<int>(x.size()) != problem.n)
    throw EvaluationFailure(
        fmt::format("{}: point has length {}, expected {}", problem.name, x.size(), problem.n));
  return complete_evaluation(problem, evaluate_values(problem, x, counters), counters);
}

double penalty_value(double f0, std::span<const double> fI, int m_ineq, double c) {
  double eq_sum = 0.0;
  for (std::size_t i = m_ineq; i < fI.size(); ++i) eq_sum += fI[i];
  return f0 - c * eq_sum;
}

double penalty_value(const Evaluation& ev, double c) {
  return penalty_value(ev.f0, ev.fI, ev.m_ineq, c);
}

Vector penalty_gradient(const Evaluation& ev, double c) {
  Vector grad = ev.g0;
  for (int i = ev.m_ineq; i < ev.m(); ++i)
    for (int j = 0; j < ev.n(); ++j) grad[j] -= c * ev.gI(j, i);
  return grad;
}

Vector compute_pi(const Evaluation& ev, double p) {
  const int m = ev.m();
  if (m == 0) return {};
  // NᵀN + D with N = gI (n×m).
  Matrix system = ev.gI.transpose() * ev.gI;
  for (int i = 0; i < ev.m_ineq; ++i) system(i, i) += std::pow(std::abs(ev.fbar[i]), p);
  Vector rhs = transpose_times(ev.gI, ev.g0);
  for (double& v : rhs) v = -v;
  try {
    return spd_solve(system, rhs);
  } catch (const NotPositiveDefinite& e) {
    throw DegenerateConstraints(
        fmt::format("multiplier estimate: constraint gradients are dependent ({})", e.what()));
  }
}

double update_c(const PenaltyContext& ctx, std::span<const double> pi_eq) {
  if (pi_eq.empty()) return ctx.c;
  const double s = norm_inf(pi_eq) + ctx.gamma0;
  if (s > ctx.c) return std::max(s, ctx.c + ctx.gamma);
  return ctx.c;
}

Vector fd_gradient(const NlpProblem& problem, std::span<const double> x, FunctionIndex component,
                   EvalCounters& counters) {
  const int n = problem.n;
  Vector grad(n);
  Vector probe(x.begin(), x.end());
  for (int j = 0; j < n; ++j) {
    const double h = fd_step(x[j]);
    double up = 0.0;
    double down = 0.0;
    probe[j] = x[j] + h;
    if (component.value == FunctionIndex::kObjective) {
      up = checked_f0(problem, probe, counters);
      probe[j] = x[j] - h;
      down = checked_f0(problem, probe, counters);
    } else {
      up = checked_f(problem, probe, counters)[component.value];
      probe[j] = x[j] - h;
      down = checked_f(problem, probe, counters)[component.value];
    }
    probe[j] = x[j];
    grad[j] = (up - down) / (2.0 * h);
  }
  return grad;
}

double kkt_residual_original(const Evaluation& ev, std::span<const double> mu) {
  Vector stationarity = ev.g0;
  for (int i = 0; i < ev.m(); ++i)
    for (int j = 0; j < ev.n(); ++j) stationarity[j] += mu[i] * ev.gI(j, i);
  double r = norm_inf(stationarity);
  for (int i = 0; i < ev.m(); ++i) {
    if (i < ev.m_ineq) {
      r = std::max(r, std::max(0.0, ev.fI[i]));
      r = std::max(r, std::max(0.0, -mu[i]));
      r = std::max(r, std::abs(mu[i] * ev.fI[i]));
    } else {
      r = std::max(r, std::abs(ev.fI[i]));
    }
  }
  return r;
}

}  // namespace isqp
