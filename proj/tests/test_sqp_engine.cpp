#include <doctest.h>

#include <cmath>
#include <random>

#include "isqp/corpus.hpp"
#include "isqp/errors.hpp"
#include "isqp/sqp_engine.hpp"
#include "oracles.hpp"

using namespace isqp;

namespace {

NlpProblem one_dim(ScalarFn f0, VectorFn g0, int m = 0, VectorFn f = {}, MatrixFn gf = {}) {
  NlpProblem p;
  p.name = "one_dim";
  p.n = 1;
  p.m_ineq = m;
  p.f0 = std::move(f0);
  p.grad_f0 = std::move(g0);
  p.f = f ? std::move(f) : VectorFn([](std::span<const double>) { return Vector{}; });
  p.grad_f = gf ? std::move(gf) : MatrixFn([](std::span<const double>) { return Matrix(1, 0); });
  return p;
}

// min x1² + x2² s.t. x1 + x2 − 2 = 0.
NlpProblem equality_problem() {
  NlpProblem p;
  p.name = "eq";
  p.n = 2;
  p.m_eq = 1;
  p.f0 = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; };
  p.grad_f0 = [](std::span<const double> x) { return Vector{2 * x[0], 2 * x[1]}; };
  p.f = [](std::span<const double> x) { return Vector{x[0] + x[1] - 2.0}; };
  p.grad_f = [](std::span<const double>) { return Matrix{{1.0}, {1.0}}; };
  return p;
}

Evaluation eval_at(const NlpProblem& p, Vector x) {
  EvalCounters counters;
  return evaluate(p, x, counters);
}

}  // namespace

TEST_CASE("validate: defaults and ranges") {
  SolverOptions o;
  const auto w = validate(o);
  REQUIRE(w.size() == 1);
  CHECK(w[0].find("alpha") != std::string::npos);
  o.alpha = 0.4;
  CHECK(validate(o).empty());
  o.tau = 3.0;
  CHECK_THROWS_AS(validate(o), std::invalid_argument);
  o = {};
  o.theta = 0.7;
  CHECK_THROWS_AS(validate(o), std::invalid_argument);
  o = {};
  o.rho = 1.0;
  CHECK_THROWS_AS(validate(o), std::invalid_argument);
}

TEST_CASE("compute_q_diag") {
  Evaluation ev;
  ev.x = {0.0};
  ev.fI = {-1.0};
  ev.fbar = {-1.0};
  ev.gI = Matrix{{0.5}};
  CHECK(compute_q_diag(ev, Vector{1.0})[0] == doctest::Approx(1.5));
  ev.fbar = {0.0};
  CHECK(compute_q_diag(ev, Vector{3.0})[0] == 0.0);
  ev.fbar = {-2.0};
  CHECK(compute_q_diag(ev, Vector{0.0})[0] == 4.0);
}

TEST_CASE("assemble_gamma") {
  const Matrix g = assemble_gamma(Matrix{{1.0}}, Matrix{{1.0}}, Vector{2.0});
  CHECK(g(0, 0) == 1.0);
  CHECK(g(0, 1) == 1.0);
  CHECK(g(1, 0) == 1.0);
  CHECK(g(1, 1) == -2.0);
  const Matrix h{{2.0, 1.0}, {1.0, 3.0}};
  const Matrix only_h = assemble_gamma(h, Matrix(2, 0), Vector{});
  CHECK(only_h.rows() == 2);
  CHECK(only_h(1, 0) == 1.0);
}

TEST_CASE("Gamma solves: 2x2 analytic system for both right-hand sides") {
  const GammaSystem gamma(Matrix{{1.0}}, Matrix{{1.0}}, Vector{2.0});
  // ‖d0‖ + φ^σ = 3 with d0 = (3), φ = 0.
  const auto f = solve_feasibility_sle(gamma, Vector{3.0}, 0.0, 0.6);
  CHECK(f.d[0] == doctest::Approx(-1.0));
  CHECK(f.h[0] == doctest::Approx(1.0));
  CHECK(f.residual <= 1e-10);
  // ‖d0‖^τ = 3 with τ = 2.5.
  const double d0 = std::pow(3.0, 1.0 / 2.5);
  const auto c = solve_correction_sle(gamma, Vector{d0}, 0.0, 2.5, 0.6, Vector{0.0});
  CHECK(c.d[0] == doctest::Approx(-1.0));
  CHECK(c.h[0] == doctest::Approx(1.0));
  const auto zero = solve_correction_sle(gamma, Vector{0.0}, 0.0, 2.5, 0.6, Vector{0.0});
  CHECK(zero.d[0] == 0.0);
  CHECK(zero.h[0] == 0.0);
}

TEST_CASE("Gamma solves: random snapshots multiply back and satisfy the I0 rows") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 4, m = 3;
    Matrix g(n, n), N(n, m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) g(i, j) = u(rng);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) N(i, j) = u(rng);
    const Matrix H = g.transpose() * g + Matrix::identity(n);
    Vector q{0.0, 0.5 + std::abs(u(rng)), 0.5 + std::abs(u(rng))};  // constraint 0 in I0
    const GammaSystem gamma(H, N, q);
    const Vector d0{u(rng), u(rng), u(rng), u(rng)};
    const double phi = std::abs(u(rng));
    const auto f = solve_feasibility_sle(gamma, d0, phi, 0.6);
    CHECK(f.residual <= 1e-10);
    // Row of Γ for i ∈ I0 reads g_iᵀd1 = −(‖d0‖ + φ^σ).
    double gd = 0.0;
    for (std::size_t j = 0; j < n; ++j) gd += N(j, 0) * f.d[j];
    CHECK(gd == doctest::Approx(-(norm2(d0) + std::pow(phi, 0.6))).epsilon(1e-10));
    const Vector F{u(rng), u(rng), u(rng)};
    const auto c = solve_correction_sle(gamma, d0, phi, 2.5, 0.6, F);
    CHECK(c.residual <= 1e-10);
    // Independent dense oracle.
    oracle::Mat dense(n + m, oracle::Vec(n + m));
    for (std::size_t i = 0; i < n + m; ++i)
      for (std::size_t j = 0; j < n + m; ++j) dense[i][j] = gamma.matrix()(i, j);
    oracle::Vec rhs(n + m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      rhs[n + i] = -(std::pow(norm2(d0), 2.5) + std::pow(phi, 0.6)) - F[i];
    const auto ref = oracle::gauss_solve(dense, rhs);
    REQUIRE(ref);
    for (std::size_t j = 0; j < n; ++j) CHECK(c.d[j] == doctest::Approx((*ref)[j]).epsilon(1e-9));
  }
}

TEST_CASE("second_order_residual") {
  const NlpProblem sq = one_dim(
      [](std::span<const double> x) { return x[0]; }, [](std::span<const double>) { return Vector{1.0}; }, 2,
      [](std::span<const double> x) { return Vector{x[0] * x[0], 3.0 * x[0] - 1.0}; },
      [](std::span<const double> x) { return Matrix{{2.0 * x[0], 3.0}}; });
  const Evaluation ev = eval_at(sq, {1.0});
  EvalCounters counters;
  const Vector F = second_order_residual(sq, ev, Vector{0.1}, counters);
  CHECK(F[0] == doctest::Approx(0.01));
  CHECK(std::abs(F[1]) <= 1e-15);  // linear: zero up to rounding
  CHECK(counters.nf == 2);
  CHECK(counters.nf0 == 0);

  // Quadratic constraint: F = ½ d0ᵀ∇²f d0 exactly.
  NlpProblem quad;
  quad.n = 2;
  quad.m_ineq = 1;
  quad.f0 = [](std::span<const double>) { return 0.0; };
  quad.grad_f0 = [](std::span<const double>) { return Vector{0.0, 0.0}; };
  quad.f = [](std::span<const double> x) {
    return Vector{2 * x[0] * x[0] + 3 * x[0] * x[1] - x[1] * x[1] + x[0]};
  };
  quad.grad_f = [](std::span<const double> x) {
    return Matrix{{4 * x[0] + 3 * x[1] + 1}, {3 * x[0] - 2 * x[1]}};
  };
  const Evaluation qe = eval_at(quad, {0.3, -0.7});
  const Vector d{0.2, 0.5};
  const double hess = 0.5 * (4 * d[0] * d[0] + 2 * 3 * d[0] * d[1] - 2 * d[1] * d[1]);
  CHECK(second_order_residual(quad, qe, d, counters)[0] == doctest::Approx(hess).epsilon(1e-12));
}

TEST_CASE("compute_beta: closed form against a grid search") {
  CHECK(compute_beta(-1.0, -1.0, 0.4, 0.0) == 1.0);
  CHECK(compute_beta(-1.0, -2.0, 0.4, 0.0) == 1.0);
  CHECK(compute_beta(-1.0, 1.0, 0.4, 0.0) == doctest::Approx(0.3));

  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  auto grid = [](double a, double b, double theta, double phi) {
    double best = 0.0;
    for (int k = 0; k <= 1000000; ++k) {
      const double beta = k * 1e-6;
      if ((1 - beta) * a + beta * b <= theta * a + std::pow(phi, theta) + 1e-15) best = beta;
    }
    return best;
  };
  CHECK(grid(-1.0, 1.0, 0.4, 0.0) == doctest::Approx(0.3).epsilon(1e-5));
  for (int t = 0; t < 20; ++t) {
    const double a = -std::abs(u(rng));
    const double b = u(rng) * 4.0;
    const double phi = t % 2 ? 0.0 : std::abs(u(rng));
    CHECK(std::abs(compute_beta(a, b, 0.4, phi) - grid(a, b, 0.4, phi)) <= 2e-6);
  }
}

TEST_CASE("arc_search: unit step on a quadratic") {
  const NlpProblem p = one_dim([](std::span<const double> x) { return x[0] * x[0]; },
                               [](std::span<const double> x) { return Vector{2 * x[0]}; });
  const Evaluation ev = eval_at(p, {1.0});
  const SolverOptions o;
  EvalCounters counters;
  const auto acc = arc_search({p, ev, o.c_init, o}, Vector{-1.0}, Vector{-1.0}, counters);
  REQUIRE(acc);
  CHECK(acc->t == 1.0);
  CHECK(acc->point.x[0] == 0.0);
  CHECK(counters.nf0 == 1);
}

TEST_CASE("arc_search: falls back when a steep constraint rejects every t >= epsilon") {
  const NlpProblem p = one_dim(
      [](std::span<const double> x) { return -x[0]; }, [](std::span<const double>) { return Vector{-1.0}; }, 1,
      [](std::span<const double> x) { return Vector{x[0] * x[0] - 1e-4}; },
      [](std::span<const double> x) { return Matrix{{2 * x[0]}}; });
  const Evaluation ev = eval_at(p, {0.0});
  const SolverOptions o;
  EvalCounters counters;
  const auto acc = arc_search({p, ev, o.c_init, o}, Vector{1.0}, Vector{1.0}, counters);
  CHECK_FALSE(acc);
  CHECK(counters.nf0 == 4);  // t = 1, 1/2, 1/4, 1/8
  CHECK(counters.nf == 4);
}

TEST_CASE("feasible_direction_search") {
  const SolverOptions o;
  EvalCounters counters;
  {
    const NlpProblem p = one_dim([](std::span<const double> x) { return x[0] * x[0]; },
                                 [](std::span<const double> x) { return Vector{2 * x[0]}; });
    const Evaluation ev = eval_at(p, {1.0});
    CHECK(feasible_direction_search({p, ev, o.c_init, o}, Vector{-1.0}, Vector{-1.0}, 0.0, counters).t == 1.0);
  }
  {
    // Quartic merit: independent Armijo loop gives the expected breakpoint.
    auto f = [](double x) { return x * x * x * x; };
    const NlpProblem p = one_dim([f](std::span<const double> x) { return f(x[0]); },
                                 [](std::span<const double> x) { return Vector{4 * x[0] * x[0] * x[0]}; });
    const Evaluation ev = eval_at(p, {1.0});
    double expected = 1.0;
    while (!(f(1.0 - expected) <= 1.0 + o.alpha_hat * expected * -4.0)) expected *= o.eta;
    CHECK(expected == 0.25);
    const auto acc = feasible_direction_search({p, ev, o.c_init, o}, Vector{-1.0}, Vector{-1.0}, 0.0, counters);
    CHECK(acc.t == expected);
    CHECK(acc.trials == 3);
  }
  {
    // Ascent direction never satisfies the Armijo test.
    const NlpProblem p = one_dim([](std::span<const double> x) { return x[0]; },
                                 [](std::span<const double>) { return Vector{1.0}; });
    const Evaluation ev = eval_at(p, {0.0});
    CHECK_THROWS_AS(feasible_direction_search({p, ev, o.c_init, o}, Vector{1.0}, Vector{1.0}, 0.0, counters),
                    LineSearchStall);
  }
}

TEST_CASE("bfgs_update: quadratic model keeps H SPD and meets the secant condition") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SolverOptions o;
  for (int t = 0; t < 50; ++t) {
    Matrix g(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) g(i, j) = u(rng);
    Matrix G = g.transpose() * g;
    for (std::size_t i = 0; i < 3; ++i) G(i, i) += 0.2;
    const Vector s{u(rng), u(rng), u(rng)};
    const Vector y = G * s;
    const auto r = bfgs_update(Matrix::identity(3), s, y, Matrix(3, 0), 0.3, o);
    REQUIRE(r.updated);
    CHECK(r.alpha_k == (dot(s, y) >= o.mu_bfgs * dot(s, s) ? 0.0 : 1.0));
    const Vector hs = r.H * s;
    for (std::size_t j = 0; j < 3; ++j) CHECK(hs[j] == doctest::Approx(r.y_hat[j]).epsilon(1e-10));
    CHECK(r.H.is_symmetric());
    CHECK_NOTHROW(cholesky(r.H));
  }
}

TEST_CASE("bfgs_update: branch 1 leaves y unchanged") {
  const SolverOptions o;
  const Vector s{1.0, 0.0}, y{2.0, 0.5};
  const auto r = bfgs_update(Matrix::identity(2), s, y, Matrix{{1.0}, {1.0}}, 0.1, o);
  CHECK(r.alpha_k == 0.0);
  CHECK(r.y_hat == y);
}

TEST_CASE("bfgs_update: branch 2 adds the full correction") {
  const SolverOptions o;
  const Vector s{1.0, 0.0}, y{0.2, 1.0};
  const Matrix A{{1.0}, {1.0}};
  const auto r = bfgs_update(Matrix::identity(2), s, y, A, 0.1, o);
  CHECK(r.alpha_k == 1.0);
  // ŷ = y + γs + AAᵀs with γ = 0.01, AAᵀs = (1, 1).
  CHECK(r.y_hat[0] == doctest::Approx(0.2 + 0.01 + 1.0));
  CHECK(r.y_hat[1] == doctest::Approx(1.0 + 1.0));
  CHECK(r.updated);
}

TEST_CASE("bfgs_update: branch 3 restores positive curvature") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const SolverOptions o;
  for (int t = 0; t < 50; ++t) {
    const Vector s{u(rng), u(rng), u(rng)};
    Vector y{u(rng), u(rng), u(rng)};
    if (dot(s, y) >= 0.0) y = scaled(-1.0, y);
    if (dot(s, y) == 0.0) continue;
    Matrix A(3, 2);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 2; ++j) A(i, j) = u(rng);
    const double d0_norm = 2.0 * std::abs(u(rng));
    const auto r = bfgs_update(Matrix::identity(3), s, y, A, d0_norm, o);
    const double gamma = std::min(d0_norm * d0_norm, o.kappa);
    const Vector ats = transpose_times(A, s);
    const double ss = dot(s, s), aa = dot(ats, ats), sy = dot(s, y);
    CHECK(r.alpha_k == doctest::Approx(1.0 + (gamma * ss - sy) / (gamma * ss + aa)));
    const double expected = 2.0 * gamma * ss + aa;
    CHECK(dot(s, r.y_hat) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(dot(s, r.y_hat) > 0.0);
    if (r.updated) CHECK_NOTHROW(cholesky(r.H));
  }
}

TEST_CASE("bfgs_update: skipped when the corrected curvature vanishes") {
  const SolverOptions o;
  // sᵀy < 0 with γ = 0 and Aᵀs = 0 leaves no usable curvature.
  const auto r = bfgs_update(Matrix::identity(2), Vector{1.0, 0.0}, Vector{-1.0, 0.0}, Matrix{{0.0}, {1.0}},
                             0.0, o);
  CHECK_FALSE(r.updated);
  CHECK(r.H(0, 0) == 1.0);
}

TEST_CASE("recover_mu") {
  CHECK(recover_mu(Vector{1.0, 2.0, 5.0}, 2, 3.0) == Vector{1.0, 2.0, 2.0});
}

TEST_CASE("step: KKT point converges immediately") {
  // HS012 optimum (2, 3) with its constraint active; d0 = 0 for any H.
  const auto& hs = get_problem("HS012");
  const SolveReport r = solve(hs.problem, Vector{2.0, 3.0});
  CHECK(r.status == SolveStatus::Converged);
  CHECK(r.ni == 0);
  CHECK(r.fv == doctest::Approx(-30.0));
}

TEST_CASE("step: one HS012 step decreases the merit function") {
  const auto& hs = get_problem("HS012");
  SolverOptions o;
  IterateState st = initial_state(hs.problem, hs.start('a')->x, o);
  const double before = penalty_value(st.ev, st.c);
  const StepOutcome out = step(hs.problem, st, o);
  REQUIRE_FALSE(out.converged);
  CHECK(st.k == 1);
  CHECK(st.ev.phi == 0.0);
  CHECK(penalty_value(st.ev, st.c) < before);
  CHECK(st.nii == 1);
}

TEST_CASE("step: exact multipliers at a KKT point give d0 = 0") {
  // min (x − 1)² s.t. x − 1 <= 0 at the solution x = 1.
  const NlpProblem p = one_dim(
      [](std::span<const double> x) { return (x[0] - 1) * (x[0] - 1); },
      [](std::span<const double> x) { return Vector{2 * (x[0] - 1)}; }, 1,
      [](std::span<const double> x) { return Vector{x[0] - 1}; },
      [](std::span<const double>) { return Matrix{{1.0}}; });
  SolverOptions o;
  IterateState st = initial_state(p, Vector{1.0}, o);
  const StepOutcome out = step(p, st, o);
  CHECK(out.converged);
  CHECK(st.k == 0);
}

TEST_CASE("solve: published values") {
  const auto run = [](const char* name, char which) {
    const auto& e = get_problem(name);
    return solve(e.problem, e.start(which)->x);
  };
  const SolveReport hs076 = run("HS076", 'a');
  CHECK(hs076.status == SolveStatus::Converged);
  CHECK(std::abs(hs076.fv - -4.681818182) <= 1e-6);
  CHECK(hs076.phi_final == 0.0);
  const SolveReport hs012 = run("HS012", 'a');
  CHECK(std::abs(hs012.fv - -30.0) <= 1e-6);
  const SolveReport hs036 = run("HS036", 'a');
  CHECK(std::abs(hs036.fv - -3299.99999999996) <= 1e-4 * 3300.0);
  CHECK(hs036.ni == hs036.nio + hs036.nii);
}

TEST_CASE("solve: HS035 from the infeasible start spends iterations outside first") {
  const auto& e = get_problem("HS035");
  SolverOptions o;
  o.trace = true;
  const SolveReport r = solve(e.problem, e.start('b')->x, o);
  REQUIRE(r.status == SolveStatus::Converged);
  CHECK(r.nio >= 1);
  CHECK(r.nii >= 1);
  // All infeasible iterates come before all feasible ones.
  for (std::size_t k = 0; k < r.trace.size(); ++k)
    CHECK((r.trace[k].phi > 0.0) == (static_cast<int>(k) < r.nio));
}

TEST_CASE("solve: equality-constrained problem") {
  SolverOptions o;
  o.trace = true;
  const SolveReport r = solve(equality_problem(), Vector{3.0, -4.0}, o);
  REQUIRE(r.status == SolveStatus::Converged);
  CHECK(std::abs(r.x_final[0] - 1.0) <= 1e-6);
  CHECK(std::abs(r.x_final[1] - 1.0) <= 1e-6);
  CHECK(r.mu[0] == doctest::Approx(-2.0).epsilon(1e-5));
  CHECK(r.c_changes <= 3);
  CHECK(r.c_final >= o.c_init);
  for (std::size_t k = 1; k < r.trace.size(); ++k) {
    CHECK(r.trace[k].c >= r.trace[k - 1].c);
    if (r.trace[k].c != r.trace[k - 1].c) CHECK(r.trace[k].c - r.trace[k - 1].c >= o.gamma);
  }
}

TEST_CASE("solve: failures are reported through the status") {
  NlpProblem p = one_dim([](std::span<const double> x) { return std::log(x[0]) - x[0]; },
                         [](std::span<const double> x) { return Vector{1.0 / x[0] - 1.0}; });
  // Start outside the domain of the log.
  SolverOptions o;
  const SolveReport r = solve(p, Vector{-1.0}, o);
  CHECK(r.status == SolveStatus::EvaluationFailure);
  CHECK_FALSE(r.message.empty());

  const auto& e = get_problem("HS100");
  o.max_iter = 2;
  const SolveReport capped = solve(e.problem, e.start('a')->x, o);
  CHECK(capped.status == SolveStatus::MaxIterations);
  CHECK(capped.ni == 2);
}
