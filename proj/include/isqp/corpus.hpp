#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isqp/nlp_model.hpp"

namespace isqp {

struct StartPoint {
  Vector x;
  /// False when the point is our own choice rather than the one used by the
  /// published comparison runs.
  bool reference = false;
  std::string note;
};

struct Dims {
  int n = 0;
  int m_ineq = 0;
  int m_eq = 0;
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// A Hock–Schittkowski problem with starting points and published results.
struct CorpusEntry {
  std::string name;
  NlpProblem problem;
  std::optional<StartPoint> x0_feasible;    // start "a"
  std::optional<StartPoint> x0_infeasible;  // start "b"
  double fv_reference = 0.0;                // published final value from "a"
  std::optional<double> fv_reference_b;     // published final value from "b"
  std::vector<double> fv_alternatives;      // other known KKT values
  double fv_tolerance = 1e-6;
  std::optional<int> published_ni_a;
  std::optional<int> published_ni_b;
  Dims dims;

  /// max(1e-6, 1e-7·|reference|) around the reference or any alternative.
  bool accepts(double fv, std::optional<double> reference = std::nullopt) const;
  const StartPoint* start(char which) const;
};

std::vector<std::string> list_problems();

/// Throws UnknownProblem.
const CorpusEntry& get_problem(std::string_view name);

struct GradientReport {
  int points = 0;
  double max_relative_error = 0.0;
  int worst_component = -1;  // -1 is the objective
};

/// Compares analytic gradients with central differences at 10 random points
/// near the starting point. Throws GradientMismatch above 1e-4 relative.
GradientReport verify_gradients(const CorpusEntry& entry, std::uint64_t seed = 2012);

}  // namespace isqp
