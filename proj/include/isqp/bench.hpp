#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "isqp/sqp_engine.hpp"

namespace isqp {

/// One solver run, one row of the results table.
struct RunRecord {
  std::string problem;
  int n = 0;
  int m1 = 0;
  int m2 = 0;
  std::string start;  // "a", "b" or "custom"
  std::string status;
  int nio = 0;
  int nii = 0;
  int ni = 0;
  long nf0 = 0;
  long nf = 0;
  double fv = 0.0;
  double kkt_residual = 0.0;
  double phi_final = 0.0;
  double cpu_seconds = 0.0;

  bool converged() const { return status == to_string(SolveStatus::Converged); }
};

struct BenchmarkSelection {
  std::vector<std::string> problems;  // empty selects the whole corpus
  std::string start = "all";          // "a", "b" or "all"
  std::optional<Vector> x0;           // custom start; requires one problem
};

/// Called after each run with its full report (e.g. to print a trace).
using RunObserver = std::function<void(const RunRecord&, const SolveReport&)>;

/// Runs every selected (problem, start) pair in corpus order. Throws
/// UnknownProblem listing every unknown name before running anything.
std::vector<RunRecord> run_benchmark(const BenchmarkSelection& selection,
                                     const SolverOptions& options,
                                     const RunObserver& observer = {});

enum class TableFormat { Csv, Markdown };

inline constexpr std::string_view kResultsHeader =
    "problem,n,m1,m2,start,status,nio,nii,ni,nf0,nf,fv,kkt_residual,cpu_seconds";

std::string emit_table(std::span<const RunRecord> records, TableFormat format);

/// Inverse of emit_table(..., Csv). Throws std::runtime_error on malformed input.
std::vector<RunRecord> parse_results_csv(std::string_view text);

enum class ProfileMetric { Ni, Nf0, Cpu };

std::optional<ProfileMetric> parse_metric(std::string_view name);

struct ProfilePoint {
  double tau = 1.0;
  double rho = 0.0;
};

struct ProfileCurve {
  std::string solver_label;
  std::vector<ProfilePoint> points;  // tau ascending
};

/// Performance profiles over runs keyed by (problem, start). Runs that did
/// not converge get ratio +∞. Every curve is sampled at τ = 1 and at every
/// distinct finite ratio of any solver. Throws InconsistentRecords when the
/// labels cover different problem sets.
std::vector<ProfileCurve> compute_profiles(
    const std::map<std::string, std::vector<RunRecord>>& records_by_label, ProfileMetric metric);

/// `solver,tau,rho` rows sorted by (solver, tau).
std::string emit_profile_csv(std::span<const ProfileCurve> curves);

/// Names accepted in config files and as --<name> flags.
std::vector<std::string> option_names();

/// Sets one option by name; returns false for an unknown name.
bool set_option(SolverOptions& options, std::string_view name, double value);

/// Applies a flat JSON object of option overrides. Throws std::runtime_error
/// on unknown keys or non-numeric values.
SolverOptions apply_config_json(SolverOptions base, std::string_view json_text);

}  // namespace isqp
