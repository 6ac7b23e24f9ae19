#include "isqp/sqp_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "isqp/errors.hpp"

namespace isqp {

namespace {

constexpr int kMaxFeasibleDirectionReductions = 60;
constexpr double kMultiplierFloor = 1e-12;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

bool in_open_unit(double v) { return v > 0.0 && v < 1.0; }

Vector along(std::span<const double> x, double t, std::span<const double> d) {
  Vector out(x.begin(), x.end());
  axpy(t, d, out);
  return out;
}

QpInstance build_qp(const Evaluation& ev, const Matrix& H, double c, const SolverOptions& options) {
  QpInstance qp;
  qp.H = H;
  qp.grad = penalty_gradient(ev, c);
  qp.A = ev.gI.transpose();
  qp.b = scaled(-1.0, ev.fbar);
  qp.active_tol = options.active_tol;
  return qp;
}

QpSolution solve_subproblem(const QpInstance& qp) {
  QpSolution sol = solve_qp(qp);
  for (double& l : sol.lambda)
    if (std::abs(l) < kMultiplierFloor) l = 0.0;
  return sol;
}

Matrix active_columns(const Matrix& gI, const std::vector<int>& active) {
  Matrix a(gI.rows(), active.size());
  for (std::size_t k = 0; k < active.size(); ++k)
    for (std::size_t j = 0; j < gI.rows(); ++j) a(j, k) = gI(j, active[k]);
  return a;
}

bool passes_cholesky(const Matrix& H) {
  try {
    (void)cholesky(H);
    return true;
  } catch (const NotPositiveDefinite&) {
    return false;
  }
}

}  // namespace

std::vector<std::string> validate(const SolverOptions& o) {
  require(o.p > 0 && o.epsilon > 0 && o.gamma > 0 && o.gamma0 > 0, "p, epsilon, gamma, gamma0 must be positive");
  require(o.c_init > 0, "c_init must be positive");
  require(o.rho > 1, "rho must exceed 1");
  require(o.theta > 0 && o.theta < o.sigma, "theta must lie in (0, sigma)");
  require(in_open_unit(o.sigma) && in_open_unit(o.eta) && in_open_unit(o.alpha) &&
              in_open_unit(o.alpha_hat),
          "sigma, eta, alpha, alpha_hat must lie in (0, 1)");
  require(o.tau > 2 && o.tau < 3, "tau must lie in (2, 3)");
  require(in_open_unit(o.kappa) && in_open_unit(o.mu_bfgs), "kappa, mu_bfgs must lie in (0, 1)");
  require(o.term_tol > 0 && o.active_tol > 0 && o.kkt_tol > 0, "tolerances must be positive");
  require(o.max_iter > 0, "max_iter must be positive");

  std::vector<std::string> warnings;
  if (o.alpha >= 0.5)
    warnings.push_back(fmt::format(
        "alpha = {} is outside (0, 1/2); unit steps near the solution are not guaranteed",
        o.alpha));
  return warnings;
}

std::string_view to_string(Branch branch) {
  return branch == Branch::ArcSearch ? "arc" : "feasible";
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::Degenerate: return "Degenerate";
    case SolveStatus::EvaluationFailure: return "EvaluationFailure";
    case SolveStatus::LineSearchStall: return "LineSearchStall";
  }
  return "Unknown";
}

GammaSystem::GammaSystem(const Matrix& H, const Matrix& N, std::span<const double> q)
    : n_(static_cast<int>(H.rows())),
      m_(static_cast<int>(q.size())),
      gamma_(assemble_gamma(H, N, q)),
      lu_(gamma_) {}

GammaSystem::Solution GammaSystem::solve(std::span<const double> rhs_h) const {
  Vector rhs(n_ + m_, 0.0);
  std::copy(rhs_h.begin(), rhs_h.end(), rhs.begin() + n_);
  const Vector z = lu_.solve(rhs);
  Solution sol;
  sol.d.assign(z.begin(), z.begin() + n_);
  sol.h.assign(z.begin() + n_, z.end());
  sol.residual = residual_inf(gamma_, z, rhs) / std::max(1.0, norm_inf(rhs));
  return sol;
}

Vector compute_q_diag(const Evaluation& ev, std::span<const double> d0) {
  const double d0_norm = norm2(d0);
  Vector q(ev.m());
  for (int i = 0; i < ev.m(); ++i) {
    double gd = 0.0;
    for (int j = 0; j < ev.n(); ++j) gd += ev.gI(j, i) * d0[j];
    q[i] = std::abs(ev.fbar[i]) * (std::abs(ev.fbar[i] + gd) + d0_norm);
  }
  return q;
}

Matrix assemble_gamma(const Matrix& H, const Matrix& N, std::span<const double> q) {
  const std::size_t n = H.rows();
  const std::size_t m = q.size();
  Matrix gamma(n + m, n + m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) gamma(i, j) = H(i, j);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      gamma(i, n + k) = N(i, k);
      gamma(n + k, i) = N(i, k);
    }
  for (std::size_t k = 0; k < m; ++k) gamma(n + k, n + k) = -q[k];
  return gamma;
}

GammaSystem::Solution solve_feasibility_sle(const GammaSystem& gamma, std::span<const double> d0,
                                            double phi, double sigma) {
  const double shift = norm2(d0) + std::pow(phi, sigma);
  return gamma.solve(Vector(gamma.m(), -shift));
}

GammaSystem::Solution solve_correction_sle(const GammaSystem& gamma, std::span<const double> d0,
                                           double phi, double tau, double sigma,
                                           std::span<const double> second_order) {
  const double shift = std::pow(norm2(d0), tau) + std::pow(phi, sigma);
  Vector rhs(gamma.m());
  for (int i = 0; i < gamma.m(); ++i) rhs[i] = -shift - second_order[i];
  return gamma.solve(rhs);
}

Vector second_order_residual(const NlpProblem& problem, const Evaluation& ev,
                             std::span<const double> d0, EvalCounters& counters) {
  if (ev.m() == 0) return {};
  const Vector shifted = evaluate_constraints(problem, along(ev.x, 1.0, d0), counters);
  Vector out(ev.m());
  for (int i = 0; i < ev.m(); ++i) {
    double gd = 0.0;
    for (int j = 0; j < ev.n(); ++j) gd += ev.gI(j, i) * d0[j];
    out[i] = shifted[i] - ev.fI[i] - gd;
  }
  return out;
}

double compute_beta(double slope0, double slope1, double theta, double phi) {
  const double room = (theta - 1.0) * slope0 + std::pow(phi, theta);
  const double growth = slope1 - slope0;
  if (growth <= 0.0) return 1.0;
  return std::clamp(room / growth, 0.0, 1.0);
}

std::optional<StepAcceptance> arc_search(const LineSearchContext& ctx, std::span<const double> d,
                                         std::span<const double> d0, EvalCounters& counters) {
  const auto& o = ctx.options;
  const Evaluation& ev = ctx.ev;
  const double merit = penalty_value(ev, ctx.c);
  const double slope0 = dot(penalty_gradient(ev, ctx.c), d0);
  const double phi_theta = std::pow(ev.phi, o.theta);
  const double shrink = std::pow(norm2(d0), o.tau) + std::pow(ev.phi, o.sigma);
  const int satisfied = static_cast<int>(ev.iminus.size());

  StepAcceptance acc;
  for (double t = 1.0; t >= o.epsilon; t *= 0.5) {
    ++acc.trials;
    PointValues pv = evaluate_values(ctx.problem, along(ev.x, t, d), counters);
    const double bound = std::max(0.0, ev.phi - o.alpha * t * shrink);
    const bool decrease = penalty_value(pv.f0, pv.fI, ev.m_ineq, ctx.c) <=
                          merit + o.alpha * t * slope0 + o.rho * (1.0 - o.alpha) * t * phi_theta;
    const bool bounded =
        std::all_of(pv.fI.begin(), pv.fI.end(), [&](double v) { return v <= bound; });
    if (decrease && bounded && count_satisfied(pv.fI) >= satisfied) {
      acc.t = t;
      acc.point = std::move(pv);
      return acc;
    }
  }
  return std::nullopt;
}

StepAcceptance feasible_direction_search(const LineSearchContext& ctx,
                                         std::span<const double> dhat,
                                         std::span<const double> d0, double beta,
                                         EvalCounters& counters) {
  const auto& o = ctx.options;
  const Evaluation& ev = ctx.ev;
  const double merit = penalty_value(ev, ctx.c);
  const double slope = dot(penalty_gradient(ev, ctx.c), dhat);
  const double phi_theta = std::pow(ev.phi, o.theta);
  const double shrink = beta * (norm2(d0) + std::pow(ev.phi, o.sigma));
  const int satisfied = static_cast<int>(ev.iminus.size());

  StepAcceptance acc;
  double t = 1.0;
  for (int reduction = 0; reduction <= kMaxFeasibleDirectionReductions; ++reduction, t *= o.eta) {
    ++acc.trials;
    PointValues pv = evaluate_values(ctx.problem, along(ev.x, t, dhat), counters);
    const double bound = std::max(0.0, ev.phi - o.alpha_hat * t * shrink);
    const bool decrease =
        penalty_value(pv.f0, pv.fI, ev.m_ineq, ctx.c) <=
        merit + o.alpha_hat * t * slope + o.rho * (1.0 - o.alpha_hat) * t * phi_theta;
    const bool bounded =
        std::all_of(pv.fI.begin(), pv.fI.end(), [&](double v) { return v <= bound; });
    if (decrease && bounded && count_satisfied(pv.fI) >= satisfied) {
      acc.t = t;
      acc.point = std::move(pv);
      return acc;
    }
  }
  throw LineSearchStall(fmt::format("feasible-direction search failed after {} reductions (t = {:.3e})",
                                    kMaxFeasibleDirectionReductions, t));
}

Vector lagrangian_gradient(const Evaluation& ev, double c, std::span<const double> lambda) {
  Vector g = penalty_gradient(ev, c);
  for (int i = 0; i < ev.m(); ++i) {
    if (lambda[i] == 0.0) continue;
    for (int j = 0; j < ev.n(); ++j) g[j] += lambda[i] * ev.gI(j, i);
  }
  return g;
}

BfgsResult bfgs_update(const Matrix& H, std::span<const double> s, std::span<const double> y,
                       const Matrix& active_gradients, double d0_norm,
                       const SolverOptions& options) {
  BfgsResult out;
  out.H = H;

  const double ss = dot(s, s);
  const double sy = dot(s, y);
  const double gamma_k = std::min(d0_norm * d0_norm, options.kappa);
  const Vector ats = transpose_times(active_gradients, s);  // A_kᵀs
  const double aa = dot(ats, ats);

  if (sy >= options.mu_bfgs * ss) {
    out.alpha_k = 0.0;
  } else if (sy >= 0.0) {
    out.alpha_k = 1.0;
  } else {
    const double denom = gamma_k * ss + aa;
    if (!(denom > 0.0)) return out;
    out.alpha_k = 1.0 + (gamma_k * ss - sy) / denom;
  }

  out.y_hat.assign(y.begin(), y.end());
  if (out.alpha_k != 0.0) {
    Vector correction = active_gradients * ats;  // A_kA_kᵀs
    axpy(gamma_k, s, correction);
    axpy(out.alpha_k, correction, out.y_hat);
  }

  const Vector hs = H * s;
  const double shs = dot(s, hs);
  const double sy_hat = dot(s, out.y_hat);
  if (!(shs > 0.0) || !(sy_hat > 1e-12 * norm2(s) * norm2(out.y_hat))) return out;

  const std::size_t n = H.rows();
  Matrix next(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      next(i, j) = H(i, j) - hs[i] * hs[j] / shs + out.y_hat[i] * out.y_hat[j] / sy_hat;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (next(i, j) + next(j, i));
      next(i, j) = avg;
      next(j, i) = avg;
    }
  if (!passes_cholesky(next)) return out;
  out.H = std::move(next);
  out.updated = true;
  return out;
}

bool is_feasible(const Evaluation& ev) {
  return ev.phi <= 1e-10 * std::max(1.0, norm_inf(ev.fI));
}

bool IterateState::in_feasible_region() const { return is_feasible(ev); }

IterateState initial_state(const NlpProblem& problem, std::span<const double> x0,
                           const SolverOptions& options) {
  IterateState state;
  state.H = Matrix::identity(problem.n);
  state.c = options.c_init;
  state.ev = evaluate(problem, x0, state.counters);
  return state;
}

StepOutcome step(const NlpProblem& problem, IterateState& state, const SolverOptions& options) {
  StepOutcome out;
  DirectionBundle& dir = out.directions;
  IterationRecord& rec = out.record;
  const Evaluation& ev = state.ev;
  const int n = ev.n();

  // Penalty parameter; inert without equality constraints.
  if (ev.m_eq() > 0) {
    const Vector pi = compute_pi(ev, options.p);
    const double c_next = update_c({state.c, options.gamma, options.gamma0, options.p},
                                   std::span<const double>(pi).subspan(ev.m_ineq));
    if (c_next != state.c) {
      ++state.c_changes;
      state.c = c_next;
    }
  }

  // QP subproblem.
  const QpInstance qp = build_qp(ev, state.H, state.c, options);
  QpSolution qs = solve_subproblem(qp);
  const double slope0 = objective_decrease_certificate(qp, qs);
  dir.d0 = std::move(qs.d0);
  dir.lambda = std::move(qs.lambda);
  dir.active = std::move(qs.active);
  const double d0_norm = norm2(dir.d0);
  if (d0_norm <= options.term_tol && is_feasible(ev) &&
      kkt_residual_original(ev, recover_mu(dir.lambda, ev.m_ineq, state.c)) <= options.kkt_tol) {
    out.converged = true;
    return out;
  }

  rec.k = state.k;
  rec.phi = ev.phi;
  rec.c = state.c;
  rec.merit = penalty_value(ev, state.c);
  rec.d0_norm = d0_norm;
  rec.iminus = static_cast<int>(ev.iminus.size());
  if (options.trace) rec.hessian_spd = passes_cholesky(state.H);

  // Second-order correction.
  const Vector q = compute_q_diag(ev, dir.d0);
  std::optional<GammaSystem> gamma;
  try {
    gamma.emplace(state.H, ev.gI, q);
  } catch (const SingularMatrix& e) {
    throw DegenerateConstraints(fmt::format("iteration {}: Γ is singular ({})", state.k, e.what()));
  }
  const Vector second_order = second_order_residual(problem, ev, dir.d0, state.counters);
  const auto sol2 =
      solve_correction_sle(*gamma, dir.d0, ev.phi, options.tau, options.sigma, second_order);
  dir.d2 = sol2.d;
  dir.h2 = sol2.h;
  rec.gamma_residual = sol2.residual;
  rec.d2_norm = norm2(dir.d2);
  const Vector d = add(dir.d0, dir.d2);

  const LineSearchContext ctx{problem, ev, state.c, options};
  std::optional<StepAcceptance> accepted = arc_search(ctx, d, dir.d0, state.counters);
  Vector direction;
  if (accepted) {
    dir.branch = Branch::ArcSearch;
    direction = d;
  } else {
    dir.branch = Branch::FeasibleDirection;
    const auto sol1 = solve_feasibility_sle(*gamma, dir.d0, ev.phi, options.sigma);
    dir.d1 = sol1.d;
    dir.h1 = sol1.h;
    rec.gamma_residual = std::max(rec.gamma_residual, sol1.residual);

    const double slope1 = dot(qp.grad, dir.d1);
    dir.beta = compute_beta(slope0, slope1, options.theta, ev.phi);
    dir.dhat = scaled(1.0 - dir.beta, dir.d0);
    axpy(dir.beta, dir.d1, dir.dhat);

    rec.slope_dhat = dot(qp.grad, dir.dhat);
    rec.slope_bound = options.theta * slope0 + std::pow(ev.phi, options.theta);
    const double decrement = dir.beta * (d0_norm + std::pow(ev.phi, options.sigma));
    rec.izero_margin = -std::numeric_limits<double>::infinity();
    for (int i : ev.izero) {
      double gd = 0.0;
      for (int j = 0; j < n; ++j) gd += ev.gI(j, i) * dir.dhat[j];
      rec.izero_margin = std::max(rec.izero_margin, gd + decrement);
    }

    accepted = feasible_direction_search(ctx, dir.dhat, dir.d0, dir.beta, state.counters);
    direction = dir.dhat;
  }
  rec.branch = dir.branch;
  rec.beta = dir.beta;
  rec.t = accepted->t;

  // Move and update the Hessian approximation.
  Evaluation next = complete_evaluation(problem, std::move(accepted->point), state.counters);
  const Vector s = subtract(next.x, ev.x);
  const Vector y =
      subtract(lagrangian_gradient(next, state.c, dir.lambda), lagrangian_gradient(ev, state.c, dir.lambda));
  const BfgsResult bfgs =
      bfgs_update(state.H, s, y, active_columns(ev.gI, dir.active), d0_norm, options);
  rec.bfgs_updated = bfgs.updated;
  rec.merit_next = penalty_value(next, state.c);
  rec.phi_next = next.phi;
  rec.iminus_next = static_cast<int>(next.iminus.size());

  if (is_feasible(ev))
    ++state.nii;
  else
    ++state.nio;
  state.H = bfgs.H;
  state.ev = std::move(next);
  ++state.k;
  return out;
}

Vector recover_mu(std::span<const double> lambda, int m_ineq, double c) {
  Vector mu(lambda.begin(), lambda.end());
  for (std::size_t i = m_ineq; i < mu.size(); ++i) mu[i] -= c;
  return mu;
}

SolveReport solve(const NlpProblem& problem, std::span<const double> x0,
                  const SolverOptions& options) {
  SolveReport report;
  report.warnings = validate(options);
  const auto start = std::chrono::steady_clock::now();

  IterateState state;
  std::optional<StepOutcome> last;
  try {
    state = initial_state(problem, x0, options);
    for (;;) {
      StepOutcome outcome = step(problem, state, options);
      if (outcome.converged) {
        report.status = SolveStatus::Converged;
        last = std::move(outcome);
        break;
      }
      if (options.trace) report.trace.push_back(outcome.record);
      last = std::move(outcome);
      if (state.k >= options.max_iter) {
        report.status = SolveStatus::MaxIterations;
        report.message = fmt::format("no convergence after {} iterations", state.k);
        break;
      }
    }
  } catch (const EvaluationFailure& e) {
    report.status = SolveStatus::EvaluationFailure;
    report.message = e.what();
  } catch (const LineSearchStall& e) {
    report.status = SolveStatus::LineSearchStall;
    report.message = e.what();
  } catch (const SolverError& e) {
    report.status = SolveStatus::Degenerate;
    report.message = e.what();
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  report.c_final = state.c;
  report.c_changes = state.c_changes;
  report.nio = state.nio;
  report.nii = state.nii;
  report.ni = state.nio + state.nii;
  report.nf0 = state.counters.nf0;
  report.nf = state.counters.nf;
  if (state.ev.x.empty()) {
    report.x_final.assign(x0.begin(), x0.end());
    report.fv = std::numeric_limits<double>::quiet_NaN();
    report.kkt_residual = std::numeric_limits<double>::infinity();
    report.phi_final = std::numeric_limits<double>::infinity();
    return report;
  }
  report.x_final = state.ev.x;
  report.fv = state.ev.f0;
  report.phi_final = state.ev.phi;

  // Multipliers at the final point: reuse the terminating QP, otherwise solve
  // the subproblem once more for diagnostics.
  try {
    if (report.status == SolveStatus::Converged) {
      report.lambda = last->directions.lambda;
    } else {
      report.lambda = solve_subproblem(build_qp(state.ev, state.H, state.c, options)).lambda;
    }
    report.mu = recover_mu(report.lambda, problem.m_ineq, state.c);
    report.kkt_residual = kkt_residual_original(state.ev, report.mu);
  } catch (const SolverError&) {
    report.kkt_residual = std::numeric_limits<double>::infinity();
  }
  return report;
}

}  // namespace isqp
