#include "isqp/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "isqp/errors.hpp"

namespace isqp {

namespace {

using X = std::span<const double>;

/// One inequality constraint f(x) <= 0 with its gradient.
struct Constraint {
  std::function<double(X)> value;
  std::function<Vector(X)> grad;
};

/// a·x − rhs <= 0
Constraint linear(Vector a, double rhs) {
  return {[a, rhs](X x) { return dot(a, x) - rhs; }, [a](X) { return a; }};
}

Vector unit(int n, int j, double scale) {
  Vector e(n, 0.0);
  e[j] = scale;
  return e;
}

/// Appends lower bounds (l_j − x_j <= 0) then upper bounds (x_j − u_j <= 0)
/// variable by variable; NaN skips a side.
void add_bounds(std::vector<Constraint>& cons, std::vector<std::pair<double, double>> bounds) {
  const int n = static_cast<int>(bounds.size());
  for (int j = 0; j < n; ++j) {
    const auto [lo, hi] = bounds[j];
    if (!std::isnan(lo)) cons.push_back(linear(unit(n, j, -1.0), -lo));
    if (!std::isnan(hi)) cons.push_back(linear(unit(n, j, 1.0), hi));
  }
}

constexpr double kNone = std::numeric_limits<double>::quiet_NaN();

NlpProblem make_problem(std::string name, int n, ScalarFn f0, VectorFn g0,
                        std::vector<Constraint> cons) {
  NlpProblem p;
  p.name = std::move(name);
  p.n = n;
  p.m_ineq = static_cast<int>(cons.size());
  p.m_eq = 0;
  p.f0 = std::move(f0);
  p.grad_f0 = std::move(g0);
  auto shared = std::make_shared<const std::vector<Constraint>>(std::move(cons));
  p.f = [shared](X x) {
    Vector v;
    v.reserve(shared->size());
    for (const auto& c : *shared) v.push_back(c.value(x));
    return v;
  };
  p.grad_f = [shared, n](X x) {
    Matrix jac(n, shared->size());
    for (std::size_t i = 0; i < shared->size(); ++i) {
      const Vector g = (*shared)[i].grad(x);
      for (int j = 0; j < n; ++j) jac(j, i) = g[j];
    }
    return jac;
  };
  return p;
}

CorpusEntry finish(CorpusEntry e) {
  e.dims = {e.problem.n, e.problem.m_ineq, e.problem.m_eq};
  return e;
}

StartPoint standard(Vector x) { return {std::move(x), true, "standard start of the collection"}; }
StartPoint chosen(Vector x, std::string note) { return {std::move(x), false, std::move(note)}; }

// HS012: min 0.5x1² + x2² − x1x2 − 7x1 − 7x2  s.t.  25 − 4x1² − x2² >= 0.
CorpusEntry hs012() {
  std::vector<Constraint> cons{
      {[](X x) { return 4 * x[0] * x[0] + x[1] * x[1] - 25; },
       [](X x) { return Vector{8 * x[0], 2 * x[1]}; }}};
  CorpusEntry e;
  e.name = "HS012";
  e.problem = make_problem(
      e.name, 2,
      [](X x) { return 0.5 * x[0] * x[0] + x[1] * x[1] - x[0] * x[1] - 7 * x[0] - 7 * x[1]; },
      [](X x) { return Vector{x[0] - x[1] - 7, 2 * x[1] - x[0] - 7}; }, std::move(cons));
  e.x0_feasible = standard({0, 0});
  e.fv_reference = -30.0;
  e.published_ni_a = 7;
  return finish(std::move(e));
}

// HS024: min ((x1−3)² − 9)x2³ / (27√3)
//   s.t. x1/√3 − x2 >= 0, x1 + √3x2 >= 0, 6 − x1 − √3x2 >= 0, x >= 0.
CorpusEntry hs024() {
  const double s3 = std::numbers::sqrt3;
  std::vector<Constraint> cons{linear({-1 / s3, 1}, 0), linear({-1, -s3}, 0),
                               linear({1, s3}, 6)};
  add_bounds(cons, {{0, kNone}, {0, kNone}});
  const double k = 27 * s3;
  CorpusEntry e;
  e.name = "HS024";
  e.problem = make_problem(
      e.name, 2,
      [k](X x) { return ((x[0] - 3) * (x[0] - 3) - 9) * x[1] * x[1] * x[1] / k; },
      [k](X x) {
        const double a = (x[0] - 3) * (x[0] - 3) - 9;
        return Vector{2 * (x[0] - 3) * x[1] * x[1] * x[1] / k, 3 * a * x[1] * x[1] / k};
      },
      std::move(cons));
  e.x0_feasible = standard({1, 0.5});
  e.fv_reference = -1.0;
  e.published_ni_a = 11;
  return finish(std::move(e));
}

// HS029: min −x1x2x3  s.t.  48 − x1² − 2x2² − 4x3² >= 0.
CorpusEntry hs029() {
  std::vector<Constraint> cons{
      {[](X x) { return x[0] * x[0] + 2 * x[1] * x[1] + 4 * x[2] * x[2] - 48; },
       [](X x) { return Vector{2 * x[0], 4 * x[1], 8 * x[2]}; }}};
  CorpusEntry e;
  e.name = "HS029";
  e.problem = make_problem(
      e.name, 3, [](X x) { return -x[0] * x[1] * x[2]; },
      [](X x) { return Vector{-x[1] * x[2], -x[0] * x[2], -x[0] * x[1]}; }, std::move(cons));
  e.x0_feasible = standard({1, 1, 1});
  e.fv_reference = -2.262741700e1;
  e.published_ni_a = 10;
  return finish(std::move(e));
}

// HS030: min x1² + x2² + x3²  s.t.  x1² + x2² − 1 >= 0, 1 <= x1 <= 10,
//   −10 <= x2, x3 <= 10.
CorpusEntry hs030() {
  std::vector<Constraint> cons{{[](X x) { return 1 - x[0] * x[0] - x[1] * x[1]; },
                                [](X x) { return Vector{-2 * x[0], -2 * x[1], 0}; }}};
  add_bounds(cons, {{1, 10}, {-10, 10}, {-10, 10}});
  CorpusEntry e;
  e.name = "HS030";
  e.problem = make_problem(
      e.name, 3, [](X x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; },
      [](X x) { return Vector{2 * x[0], 2 * x[1], 2 * x[2]}; }, std::move(cons));
  e.x0_feasible = standard({1, 1, 1});
  // The published value is ~4e-18; the collection's optimum is 1.
  e.fv_reference = 4.016837909e-18;
  e.fv_alternatives = {1.0};
  e.published_ni_a = 10;
  return finish(std::move(e));
}

// HS031: min 9x1² + x2² + 9x3²  s.t.  x1x2 − 1 >= 0, −10 <= x1 <= 10,
//   1 <= x2 <= 10, −10 <= x3 <= 1.
CorpusEntry hs031() {
  std::vector<Constraint> cons{{[](X x) { return 1 - x[0] * x[1]; },
                                [](X x) { return Vector{-x[1], -x[0], 0}; }}};
  add_bounds(cons, {{-10, 10}, {1, 10}, {-10, 1}});
  CorpusEntry e;
  e.name = "HS031";
  e.problem = make_problem(
      e.name, 3, [](X x) { return 9 * x[0] * x[0] + x[1] * x[1] + 9 * x[2] * x[2]; },
      [](X x) { return Vector{18 * x[0], 2 * x[1], 18 * x[2]}; }, std::move(cons));
  e.x0_feasible = standard({1, 1, 1});
  e.fv_reference = 6.0;
  e.published_ni_a = 13;
  return finish(std::move(e));
}

// HS033: min (x1−1)(x1−2)(x1−3) + x3  s.t.  x3² − x1² − x2² >= 0,
//   x1² + x2² + x3² − 4 >= 0, x1, x2 >= 0, 0 <= x3 <= 5.
CorpusEntry hs033() {
  std::vector<Constraint> cons{
      {[](X x) { return x[0] * x[0] + x[1] * x[1] - x[2] * x[2]; },
       [](X x) { return Vector{2 * x[0], 2 * x[1], -2 * x[2]}; }},
      {[](X x) { return 4 - x[0] * x[0] - x[1] * x[1] - x[2] * x[2]; },
       [](X x) { return Vector{-2 * x[0], -2 * x[1], -2 * x[2]}; }}};
  add_bounds(cons, {{0, kNone}, {0, kNone}, {0, 5}});
  CorpusEntry e;
  e.name = "HS033";
  e.problem = make_problem(
      e.name, 3, [](X x) { return (x[0] - 1) * (x[0] - 2) * (x[0] - 3) + x[2]; },
      [](X x) { return Vector{3 * x[0] * x[0] - 12 * x[0] + 11, 0, 1}; }, std::move(cons));
  e.x0_feasible = standard({0, 0, 3});
  e.fv_reference = -4.585785958;
  e.published_ni_a = 9;
  return finish(std::move(e));
}

std::vector<Constraint> exponential_chain() {
  std::vector<Constraint> cons{{[](X x) { return std::exp(x[0]) - x[1]; },
                                [](X x) { return Vector{std::exp(x[0]), -1, 0}; }},
                               {[](X x) { return std::exp(x[1]) - x[2]; },
                                [](X x) { return Vector{0, std::exp(x[1]), -1}; }}};
  add_bounds(cons, {{0, 100}, {0, 100}, {0, 10}});
  return cons;
}

// HS034: min −x1  s.t.  x2 − exp(x1) >= 0, x3 − exp(x2) >= 0,
//   0 <= x1, x2 <= 100, 0 <= x3 <= 10.
CorpusEntry hs034() {
  CorpusEntry e;
  e.name = "HS034";
  e.problem = make_problem(
      e.name, 3, [](X x) { return -x[0]; }, [](X) { return Vector{-1, 0, 0}; },
      exponential_chain());
  e.x0_feasible = standard({0, 1.05, 2.9});
  e.x0_infeasible = chosen({0.5, 1.0, 2.0}, "both exponential constraints violated");
  e.fv_reference = -0.83403244521568;
  e.fv_reference_b = -0.83403244522367;
  e.published_ni_a = 24;
  e.published_ni_b = 17;
  return finish(std::move(e));
}

// HS035: min 9 − 8x1 − 6x2 − 4x3 + 2x1² + 2x2² + x3² + 2x1x2 + 2x1x3
//   s.t.  3 − x1 − x2 − 2x3 >= 0, x >= 0.
CorpusEntry hs035() {
  std::vector<Constraint> cons{linear({1, 1, 2}, 3)};
  add_bounds(cons, {{0, kNone}, {0, kNone}, {0, kNone}});
  CorpusEntry e;
  e.name = "HS035";
  e.problem = make_problem(
      e.name, 3,
      [](X x) {
        return 9 - 8 * x[0] - 6 * x[1] - 4 * x[2] + 2 * x[0] * x[0] + 2 * x[1] * x[1] +
               x[2] * x[2] + 2 * x[0] * x[1] + 2 * x[0] * x[2];
      },
      [](X x) {
        return Vector{-8 + 4 * x[0] + 2 * x[1] + 2 * x[2], -6 + 4 * x[1] + 2 * x[0],
                      -4 + 2 * x[2] + 2 * x[0]};
      },
      std::move(cons));
  e.x0_feasible = standard({0.5, 0.5, 0.5});
  e.x0_infeasible = chosen({2, 2, 2}, "general constraint violated");
  e.fv_reference = 0.11111111111111;
  e.fv_reference_b = 0.11111111111111;
  e.published_ni_a = 12;
  e.published_ni_b = 10;
  return finish(std::move(e));
}

// HS036: min −x1x2x3  s.t.  72 − x1 − 2x2 − 2x3 >= 0, 0 <= x1 <= 20,
//   0 <= x2 <= 11, 0 <= x3 <= 42.
CorpusEntry hs036() {
  std::vector<Constraint> cons{linear({1, 2, 2}, 72)};
  add_bounds(cons, {{0, 20}, {0, 11}, {0, 42}});
  CorpusEntry e;
  e.name = "HS036";
  e.problem = make_problem(
      e.name, 3, [](X x) { return -x[0] * x[1] * x[2]; },
      [](X x) { return Vector{-x[1] * x[2], -x[0] * x[2], -x[0] * x[1]}; }, std::move(cons));
  e.x0_feasible = standard({10, 10, 10});
  e.x0_infeasible = chosen({21, 5, 5}, "upper bound on x1 violated");
  e.fv_reference = -3299.99999999996;
  e.fv_reference_b = -3299.99999999997;
  e.published_ni_a = 7;
  e.published_ni_b = 5;
  return finish(std::move(e));
}

// HS037: min −x1x2x3  s.t.  72 − x1 − 2x2 − 2x3 >= 0, x1 + 2x2 + 2x3 >= 0,
//   0 <= x <= 42.
CorpusEntry hs037() {
  std::vector<Constraint> cons{linear({1, 2, 2}, 72), linear({-1, -2, -2}, 0)};
  add_bounds(cons, {{0, 42}, {0, 42}, {0, 42}});
  CorpusEntry e;
  e.name = "HS037";
  e.problem = make_problem(
      e.name, 3, [](X x) { return -x[0] * x[1] * x[2]; },
      [](X x) { return Vector{-x[1] * x[2], -x[0] * x[2], -x[0] * x[1]}; }, std::move(cons));
  e.x0_feasible = standard({10, 10, 10});
  e.x0_infeasible = chosen({43, 5, 5}, "upper bound on x1 violated");
  e.fv_reference = -3455.999999999965;
  e.fv_reference_b = -3455.999999999998;
  e.published_ni_a = 23;
  e.published_ni_b = 69;
  return finish(std::move(e));
}

// HS043 (Rosen–Suzuki):
//   min x1² + x2² + 2x3² + x4² − 5x1 − 5x2 − 21x3 + 7x4
//   s.t. 8 − x1² − x2² − x3² − x4² − x1 + x2 − x3 + x4 >= 0,
//        10 − x1² − 2x2² − x3² − 2x4² + x1 + x4 >= 0,
//        5 − 2x1² − x2² − x3² − 2x1 + x2 + x4 >= 0.
CorpusEntry hs043() {
  std::vector<Constraint> cons{
      {[](X x) {
         return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3] + x[0] - x[1] + x[2] -
                x[3] - 8;
       },
       [](X x) {
         return Vector{2 * x[0] + 1, 2 * x[1] - 1, 2 * x[2] + 1, 2 * x[3] - 1};
       }},
      {[](X x) {
         return x[0] * x[0] + 2 * x[1] * x[1] + x[2] * x[2] + 2 * x[3] * x[3] - x[0] - x[3] - 10;
       },
       [](X x) { return Vector{2 * x[0] - 1, 4 * x[1], 2 * x[2], 4 * x[3] - 1}; }},
      {[](X x) {
         return 2 * x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + 2 * x[0] - x[1] - x[3] - 5;
       },
       [](X x) { return Vector{4 * x[0] + 2, 2 * x[1] - 1, 2 * x[2], -1}; }}};
  CorpusEntry e;
  e.name = "HS043";
  e.problem = make_problem(
      e.name, 4,
      [](X x) {
        return x[0] * x[0] + x[1] * x[1] + 2 * x[2] * x[2] + x[3] * x[3] - 5 * x[0] - 5 * x[1] -
               21 * x[2] + 7 * x[3];
      },
      [](X x) {
        return Vector{2 * x[0] - 5, 2 * x[1] - 5, 4 * x[2] - 21, 2 * x[3] + 7};
      },
      std::move(cons));
  e.x0_feasible = standard({0, 0, 0, 0});
  e.x0_infeasible = chosen({2, 2, 2, 2}, "all three constraints violated");
  e.fv_reference = -44.0;
  e.fv_reference_b = -44.0;
  e.published_ni_a = 12;
  e.published_ni_b = 75;
  return finish(std::move(e));
}

// HS044: min x1 − x2 − x3 − x1x3 + x1x4 + x2x3 − x2x4
//   s.t. 8 − x1 − 2x2 >= 0, 12 − 4x1 − x2 >= 0, 12 − 3x1 − 4x2 >= 0,
//        8 − 2x3 − x4 >= 0, 8 − x3 − 2x4 >= 0, 5 − x3 − x4 >= 0, x >= 0.
CorpusEntry hs044() {
  std::vector<Constraint> cons{linear({1, 2, 0, 0}, 8),  linear({4, 1, 0, 0}, 12),
                               linear({3, 4, 0, 0}, 12), linear({0, 0, 2, 1}, 8),
                               linear({0, 0, 1, 2}, 8),  linear({0, 0, 1, 1}, 5)};
  add_bounds(cons, {{0, kNone}, {0, kNone}, {0, kNone}, {0, kNone}});
  CorpusEntry e;
  e.name = "HS044";
  e.problem = make_problem(
      e.name, 4,
      [](X x) {
        return x[0] - x[1] - x[2] - x[0] * x[2] + x[0] * x[3] + x[1] * x[2] - x[1] * x[3];
      },
      [](X x) {
        return Vector{1 - x[2] + x[3], -1 + x[2] - x[3], -1 - x[0] + x[1], x[0] - x[1]};
      },
      std::move(cons));
  e.x0_feasible = standard({0, 0, 0, 0});
  e.x0_infeasible = chosen({3, 3, 3, 3}, "five of the six general constraints violated");
  e.fv_reference = -14.99999999935652;
  e.fv_reference_b = -14.99999999999756;
  e.published_ni_a = 20;
  e.published_ni_b = 9;
  return finish(std::move(e));
}

// HS065: min (x1−x2)² + (x1+x2−10)²/9 + (x3−5)²
//   s.t. 48 − x1² − x2² − x3² >= 0, −4.5 <= x1, x2 <= 4.5, −5 <= x3 <= 5.
CorpusEntry hs065() {
  std::vector<Constraint> cons{
      {[](X x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 48; },
       [](X x) { return Vector{2 * x[0], 2 * x[1], 2 * x[2]}; }}};
  add_bounds(cons, {{-4.5, 4.5}, {-4.5, 4.5}, {-5, 5}});
  CorpusEntry e;
  e.name = "HS065";
  e.problem = make_problem(
      e.name, 3,
      [](X x) {
        const double a = x[0] - x[1];
        const double b = x[0] + x[1] - 10;
        const double c = x[2] - 5;
        return a * a + b * b / 9 + c * c;
      },
      [](X x) {
        const double a = x[0] - x[1];
        const double b = x[0] + x[1] - 10;
        return Vector{2 * a + 2 * b / 9, -2 * a + 2 * b / 9, 2 * (x[2] - 5)};
      },
      std::move(cons));
  e.x0_feasible = chosen({-4, 4, 0}, "collection start pulled inside the bounds");
  e.x0_infeasible = chosen({-5, 5, 0}, "collection start; violates the bounds on x1 and x2");
  e.fv_reference = 0.95352885680478;
  e.fv_reference_b = 0.95352885680478;
  e.published_ni_a = 8;
  e.published_ni_b = 14;
  return finish(std::move(e));
}

// HS066: min 0.2x3 − 0.8x1 subject to the HS034 constraints.
CorpusEntry hs066() {
  CorpusEntry e;
  e.name = "HS066";
  e.problem = make_problem(
      e.name, 3, [](X x) { return 0.2 * x[2] - 0.8 * x[0]; },
      [](X) { return Vector{-0.8, 0, 0.2}; }, exponential_chain());
  e.x0_feasible = standard({0, 1.05, 2.9});
  e.x0_infeasible = chosen({0.5, 1.0, 2.0}, "both exponential constraints violated");
  e.fv_reference = 0.51816327418156;
  e.fv_reference_b = 0.51816327418154;
  e.published_ni_a = 10;
  e.published_ni_b = 15;
  return finish(std::move(e));
}

// HS076: min x1² + 0.5x2² + x3² + 0.5x4² − x1x3 + x3x4 − x1 − 3x2 + x3 − x4
//   s.t. 5 − x1 − 2x2 − x3 − x4 >= 0, 4 − 3x1 − x2 − 2x3 + x4 >= 0,
//        x2 + 4x3 − 1.5 >= 0, x >= 0.
CorpusEntry hs076() {
  std::vector<Constraint> cons{linear({1, 2, 1, 1}, 5), linear({3, 1, 2, -1}, 4),
                               linear({0, -1, -4, 0}, -1.5)};
  add_bounds(cons, {{0, kNone}, {0, kNone}, {0, kNone}, {0, kNone}});
  CorpusEntry e;
  e.name = "HS076";
  e.problem = make_problem(
      e.name, 4,
      [](X x) {
        return x[0] * x[0] + 0.5 * x[1] * x[1] + x[2] * x[2] + 0.5 * x[3] * x[3] - x[0] * x[2] +
               x[2] * x[3] - x[0] - 3 * x[1] + x[2] - x[3];
      },
      [](X x) {
        return Vector{2 * x[0] - x[2] - 1, x[1] - 3, 2 * x[2] - x[0] + x[3] + 1, x[3] + x[2] - 1};
      },
      std::move(cons));
  e.x0_feasible = standard({0.5, 0.5, 0.5, 0.5});
  e.fv_reference = -4.681818182;
  e.published_ni_a = 9;
  return finish(std::move(e));
}

// HS100:
//   min (x1−10)² + 5(x2−12)² + x3⁴ + 3(x4−11)² + 10x5⁶ + 7x6² + x7⁴
//       − 4x6x7 − 10x6 − 8x7
//   s.t. 127 − 2x1² − 3x2⁴ − x3 − 4x4² − 5x5 >= 0,
//        282 − 7x1 − 3x2 − 10x3² − x4 + x5 >= 0,
//        196 − 23x1 − x2² − 6x6² + 8x7 >= 0,
//        −4x1² − x2² + 3x1x2 − 2x3² − 5x6 + 11x7 >= 0.
CorpusEntry hs100() {
  std::vector<Constraint> cons{
      {[](X x) {
         return 2 * x[0] * x[0] + 3 * std::pow(x[1], 4) + x[2] + 4 * x[3] * x[3] + 5 * x[4] - 127;
       },
       [](X x) {
         return Vector{4 * x[0], 12 * x[1] * x[1] * x[1], 1, 8 * x[3], 5, 0, 0};
       }},
      {[](X x) { return 7 * x[0] + 3 * x[1] + 10 * x[2] * x[2] + x[3] - x[4] - 282; },
       [](X x) { return Vector{7, 3, 20 * x[2], 1, -1, 0, 0}; }},
      {[](X x) { return 23 * x[0] + x[1] * x[1] + 6 * x[5] * x[5] - 8 * x[6] - 196; },
       [](X x) { return Vector{23, 2 * x[1], 0, 0, 0, 12 * x[5], -8}; }},
      {[](X x) {
         return 4 * x[0] * x[0] + x[1] * x[1] - 3 * x[0] * x[1] + 2 * x[2] * x[2] + 5 * x[5] -
                11 * x[6];
       },
       [](X x) {
         return Vector{8 * x[0] - 3 * x[1], 2 * x[1] - 3 * x[0], 4 * x[2], 0, 0, 5, -11};
       }}};
  CorpusEntry e;
  e.name = "HS100";
  e.problem = make_problem(
      e.name, 7,
      [](X x) {
        return (x[0] - 10) * (x[0] - 10) + 5 * (x[1] - 12) * (x[1] - 12) + std::pow(x[2], 4) +
               3 * (x[3] - 11) * (x[3] - 11) + 10 * std::pow(x[4], 6) + 7 * x[5] * x[5] +
               std::pow(x[6], 4) - 4 * x[5] * x[6] - 10 * x[5] - 8 * x[6];
      },
      [](X x) {
        return Vector{2 * (x[0] - 10),
                      10 * (x[1] - 12),
                      4 * x[2] * x[2] * x[2],
                      6 * (x[3] - 11),
                      60 * std::pow(x[4], 5),
                      14 * x[5] - 4 * x[6] - 10,
                      4 * x[6] * x[6] * x[6] - 4 * x[5] - 8};
      },
      std::move(cons));
  e.x0_feasible = standard({1, 2, 0, 4, 0, 1, 1});
  e.x0_infeasible = chosen({3, 3, 0, 4, 0, 1, 1}, "first and fourth constraints violated");
  e.fv_reference = 682.5663838261504;
  e.fv_reference_b = 682.5663838261520;
  e.fv_alternatives = {680.6300573744018};
  e.published_ni_a = 20;
  e.published_ni_b = 21;
  return finish(std::move(e));
}

const std::map<std::string, CorpusEntry, std::less<>>& registry() {
  static const auto entries = [] {
    std::map<std::string, CorpusEntry, std::less<>> m;
    for (auto make : {hs012, hs024, hs029, hs030, hs031, hs033, hs034, hs035, hs036, hs037,
                      hs043, hs044, hs065, hs066, hs076, hs100}) {
      CorpusEntry e = make();
      std::string key = e.name;
      m.emplace(std::move(key), std::move(e));
    }
    return m;
  }();
  return entries;
}

}  // namespace

bool CorpusEntry::accepts(double fv, std::optional<double> reference) const {
  auto close = [fv](double target) {
    return std::abs(fv - target) <= std::max(1e-6, 1e-7 * std::abs(target));
  };
  if (close(reference.value_or(fv_reference))) return true;
  return std::any_of(fv_alternatives.begin(), fv_alternatives.end(), close);
}

const StartPoint* CorpusEntry::start(char which) const {
  if (which == 'a') return x0_feasible ? &*x0_feasible : nullptr;
  if (which == 'b') return x0_infeasible ? &*x0_infeasible : nullptr;
  return nullptr;
}

std::vector<std::string> list_problems() {
  std::vector<std::string> names;
  for (const auto& [name, entry] : registry()) names.push_back(name);
  return names;
}

const CorpusEntry& get_problem(std::string_view name) {
  const auto& reg = registry();
  const auto it = reg.find(name);
  if (it == reg.end()) throw UnknownProblem(fmt::format("unknown problem '{}'", name));
  return it->second;
}

GradientReport verify_gradients(const CorpusEntry& entry, std::uint64_t seed) {
  const NlpProblem& p = entry.problem;
  const StartPoint* base = entry.x0_feasible ? &*entry.x0_feasible : &*entry.x0_infeasible;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);

  GradientReport report;
  EvalCounters scratch;
  for (int k = 0; k < 10; ++k) {
    Vector x = base->x;
    for (double& v : x) v += jitter(rng) * std::max(1.0, std::abs(v));

    auto check = [&](const Vector& analytic, const Vector& numeric, int component) {
      for (int j = 0; j < p.n; ++j) {
        const double err =
            std::abs(analytic[j] - numeric[j]) / std::max(1.0, std::abs(analytic[j]));
        if (err > report.max_relative_error) {
          report.max_relative_error = err;
          report.worst_component = component;
        }
        if (err > 1e-4)
          throw GradientMismatch(
              fmt::format("{}: gradient of {} disagrees with central differences in "
                          "coordinate {} ({:.6g} vs {:.6g})",
                          p.name,
                          component < 0 ? std::string("objective")
                                        : fmt::format("constraint {}", component),
                          j, analytic[j], numeric[j]),
              component);
      }
    };

    check(p.grad_f0(x), fd_gradient(p, x, FunctionIndex{}, scratch), -1);
    const Matrix jac = p.grad_f(x);
    for (int i = 0; i < p.m(); ++i)
      check(jac.column(i), fd_gradient(p, x, FunctionIndex{i}, scratch), i);
    ++report.points;
  }
  return report;
}

}  // namespace isqp
