#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isqp/linalg.hpp"
#include "isqp/nlp_model.hpp"
#include "isqp/qp_solver.hpp"

namespace isqp {

/// Algorithm parameters. Defaults are the usual experimental settings except
/// term_tol, which is tightened so final iterates reach 1e-6 objective accuracy.
struct SolverOptions {
  double p = 2.0;            // exponent of |f̄_i| in the multiplier estimate
  double epsilon = 0.125;    // arc search gives up once t < epsilon
  double gamma = 1.0;        // minimum increase of c
  double gamma0 = 2.0;       // margin of c over max |π_i|
  double c_init = 0.5;       // c_{-1}
  double rho = 2.0;
  double theta = 0.4;
  double sigma = 0.6;
  double eta = 0.5;          // feasible-direction backtracking factor
  double alpha = 0.5;        // arc-search sufficient decrease
  double alpha_hat = 0.5;    // feasible-direction sufficient decrease
  double tau = 2.5;
  double kappa = 0.5;        // cap of γ_k in the BFGS modification
  double mu_bfgs = 0.5;      // curvature threshold of the BFGS modification
  double term_tol = 5e-8;    // stop when ‖d0‖ <= term_tol, φ = 0 and the KKT residual <= kkt_tol
  int max_iter = 500;
  double active_tol = 1e-8;
  double kkt_tol = 1e-5;     // bound on the final KKT residual
  bool trace = false;
};

/// Throws std::invalid_argument on out-of-range parameters; returns warnings
/// for legal but theoretically unsupported settings.
std::vector<std::string> validate(const SolverOptions& options);

enum class Branch { ArcSearch, FeasibleDirection };

std::string_view to_string(Branch branch);

/// Per-iteration search data.
struct DirectionBundle {
  Vector d0, d1, d2, dhat;
  Vector h1, h2;
  Vector lambda;
  std::vector<int> active;
  double beta = 0.0;
  Branch branch = Branch::ArcSearch;
};

/// Γ = [[H, N], [Nᵀ, −diag(Q)]] factorized once per iteration.
class GammaSystem {
 public:
  GammaSystem(const Matrix& H, const Matrix& N, std::span<const double> q);

  int n() const noexcept { return n_; }
  int m() const noexcept { return m_; }
  const Matrix& matrix() const noexcept { return gamma_; }

  /// Solves Γ(d; h) = (0; rhs_h) and records the residual.
  struct Solution {
    Vector d;
    Vector h;
    double residual = 0.0;  // ‖Γz − rhs‖∞ / max(1, ‖rhs‖∞)
  };
  Solution solve(std::span<const double> rhs_h) const;

 private:
  int n_;
  int m_;
  Matrix gamma_;
  LuFactorization lu_;
};

/// Q_i = |f̄_i|·(|f̄_i + g_iᵀd0| + ‖d0‖).
Vector compute_q_diag(const Evaluation& ev, std::span<const double> d0);

Matrix assemble_gamma(const Matrix& H, const Matrix& N, std::span<const double> q);

/// Right-hand side −(‖d0‖ + φ^σ)·𝟙.
GammaSystem::Solution solve_feasibility_sle(const GammaSystem& gamma, std::span<const double> d0,
                                            double phi, double sigma);

/// Right-hand side −(‖d0‖^τ + φ^σ)·𝟙 − F.
GammaSystem::Solution solve_correction_sle(const GammaSystem& gamma, std::span<const double> d0,
                                           double phi, double tau, double sigma,
                                           std::span<const double> second_order);

/// F_i = f_i(x + d0) − f_i(x) − g_iᵀd0; one constraint evaluation.
Vector second_order_residual(const NlpProblem& problem, const Evaluation& ev,
                             std::span<const double> d0, EvalCounters& counters);

/// Largest β ∈ [0,1] with (1−β)·slope0 + β·slope1 <= θ·slope0 + φ^θ.
double compute_beta(double slope0, double slope1, double theta, double phi);

struct StepAcceptance {
  double t = 1.0;
  PointValues point;
  int trials = 0;
};

/// Everything the two line searches read from the current iterate.
struct LineSearchContext {
  const NlpProblem& problem;
  const Evaluation& ev;
  double c;
  const SolverOptions& options;
};

/// Backtracks t = 1, ½, ¼, … along d; returns nullopt once t < ε.
std::optional<StepAcceptance> arc_search(const LineSearchContext& ctx, std::span<const double> d,
                                         std::span<const double> d0, EvalCounters& counters);

/// Backtracks t = 1, η, η², … along d̂. Throws LineSearchStall after 60
/// reductions.
StepAcceptance feasible_direction_search(const LineSearchContext& ctx,
                                         std::span<const double> dhat,
                                         std::span<const double> d0, double beta,
                                         EvalCounters& counters);

struct BfgsResult {
  Matrix H;
  bool updated = false;
  double alpha_k = 0.0;
  Vector y_hat;
};

/// ∇F_c + Σ λ_i g_i.
Vector lagrangian_gradient(const Evaluation& ev, double c, std::span<const double> lambda);

/// Modified BFGS update. `active_gradients` holds g_i(x^k), i ∈ L, as
/// columns. The update is skipped (H returned unchanged) when the result
/// would not be positive definite.
BfgsResult bfgs_update(const Matrix& H, std::span<const double> s, std::span<const double> y,
                       const Matrix& active_gradients, double d0_norm,
                       const SolverOptions& options);

enum class SolveStatus { Converged, MaxIterations, Degenerate, EvaluationFailure, LineSearchStall };

std::string_view to_string(SolveStatus status);

/// One row of the optional trace, describing the step from x^k to x^{k+1}.
struct IterationRecord {
  int k = 0;
  double phi = 0.0;
  double merit = 0.0;       // F_{c_k}(x^k)
  double merit_next = 0.0;  // F_{c_k}(x^{k+1})
  double phi_next = 0.0;
  double c = 0.0;
  double d0_norm = 0.0;
  double d2_norm = 0.0;
  double t = 0.0;
  double beta = 0.0;
  Branch branch = Branch::ArcSearch;
  int iminus = 0;
  int iminus_next = 0;
  bool hessian_spd = true;  // H_k passed Cholesky
  bool bfgs_updated = false;
  double gamma_residual = 0.0;  // largest relative Γ solve residual
  // Descent certificates, only meaningful on the feasible-direction branch.
  double slope_dhat = 0.0;        // ∇F_cᵀd̂
  double slope_bound = 0.0;       // θ∇F_cᵀd0 + φ^θ
  double izero_margin = 0.0;      // max_{i∈I₀} g_iᵀd̂ + β(‖d0‖ + φ^σ)
};

/// Solver state carried between iterations.
struct IterateState {
  Evaluation ev;
  Matrix H;
  double c = 0.5;
  int k = 0;
  int nio = 0;
  int nii = 0;
  int c_changes = 0;
  EvalCounters counters;

  const Vector& x() const noexcept { return ev.x; }
  bool in_feasible_region() const;
};

/// φ <= 1e-10·max(1, ‖f_I‖∞).
bool is_feasible(const Evaluation& ev);

IterateState initial_state(const NlpProblem& problem, std::span<const double> x0,
                           const SolverOptions& options);

/// Outcome of one pass of the iteration.
struct StepOutcome {
  bool converged = false;
  IterationRecord record;      // filled when a step was taken
  DirectionBundle directions;  // the last directions computed
};

/// Performs one iteration: penalty update, QP, correction SLE, arc search
/// with feasible-direction fallback, BFGS. Reports convergence instead of
/// stepping when ‖d0‖ <= term_tol, x is feasible and the KKT residual of the
/// original problem is within kkt_tol.
StepOutcome step(const NlpProblem& problem, IterateState& state, const SolverOptions& options);

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIterations;
  std::string message;
  Vector x_final;
  double fv = 0.0;
  double kkt_residual = 0.0;
  double phi_final = 0.0;
  Vector lambda;  // final QP multipliers
  Vector mu;      // multipliers of the original problem
  double c_final = 0.0;
  int c_changes = 0;
  int ni = 0;
  int nio = 0;
  int nii = 0;
  long nf0 = 0;
  long nf = 0;
  double wall_seconds = 0.0;
  std::vector<IterationRecord> trace;
  std::vector<std::string> warnings;
};

/// Maps QP multipliers of the reformulated problem to the original one:
/// μ_i = λ_i on inequalities, λ_i − c on equalities.
Vector recover_mu(std::span<const double> lambda, int m_ineq, double c);

SolveReport solve(const NlpProblem& problem, std::span<const double> x0,
                  const SolverOptions& options = {});

}  // namespace isqp
