#include "isqp/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>
#include <json.hpp>

#include "isqp/corpus.hpp"
#include "isqp/errors.hpp"

namespace isqp {

namespace {

RunRecord make_record(const CorpusEntry& entry, std::string start, const SolveReport& report) {
  RunRecord r;
  r.problem = entry.name;
  r.n = entry.dims.n;
  r.m1 = entry.dims.m_ineq;
  r.m2 = entry.dims.m_eq;
  r.start = std::move(start);
  r.status = std::string(to_string(report.status));
  r.nio = report.nio;
  r.nii = report.nii;
  r.ni = report.ni;
  r.nf0 = report.nf0;
  r.nf = report.nf;
  r.fv = report.fv;
  r.kkt_residual = report.kkt_residual;
  r.phi_final = report.phi_final;
  r.cpu_seconds = report.wall_seconds;
  return r;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  for (;;) {
    const std::size_t end = line.find(sep, begin);
    out.emplace_back(line.substr(begin, end == std::string_view::npos ? end : end - begin));
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return out;
}

double metric_value(const RunRecord& r, ProfileMetric metric) {
  switch (metric) {
    case ProfileMetric::Ni: return r.ni;
    case ProfileMetric::Nf0: return static_cast<double>(r.nf0);
    case ProfileMetric::Cpu: return r.cpu_seconds;
  }
  return r.ni;
}

struct OptionField {
  const char* name;
  double SolverOptions::*member;
};

constexpr OptionField kFields[] = {
    {"p", &SolverOptions::p},
    {"epsilon", &SolverOptions::epsilon},
    {"gamma", &SolverOptions::gamma},
    {"gamma0", &SolverOptions::gamma0},
    {"c_init", &SolverOptions::c_init},
    {"rho", &SolverOptions::rho},
    {"theta", &SolverOptions::theta},
    {"sigma", &SolverOptions::sigma},
    {"eta", &SolverOptions::eta},
    {"alpha", &SolverOptions::alpha},
    {"alpha_hat", &SolverOptions::alpha_hat},
    {"tau", &SolverOptions::tau},
    {"kappa", &SolverOptions::kappa},
    {"mu_bfgs", &SolverOptions::mu_bfgs},
    {"term_tol", &SolverOptions::term_tol},
    {"active_tol", &SolverOptions::active_tol},
    {"kkt_tol", &SolverOptions::kkt_tol},
};

}  // namespace

std::vector<RunRecord> run_benchmark(const BenchmarkSelection& selection,
                                     const SolverOptions& options, const RunObserver& observer) {
  std::vector<std::string> names = selection.problems.empty() ? list_problems() : selection.problems;
  std::vector<std::string> unknown;
  for (const auto& name : names) {
    try {
      (void)get_problem(name);
    } catch (const UnknownProblem&) {
      unknown.push_back(name);
    }
  }
  if (!unknown.empty())
    throw UnknownProblem(fmt::format("unknown problem(s): {}", fmt::join(unknown, ", ")));
  if (selection.x0 && names.size() != 1)
    throw std::invalid_argument("a custom start point needs exactly one problem");

  std::vector<RunRecord> records;
  auto run_one = [&](const CorpusEntry& entry, std::string start, const Vector& x0) {
    const SolveReport report = solve(entry.problem, x0, options);
    records.push_back(make_record(entry, std::move(start), report));
    if (observer) observer(records.back(), report);
  };

  for (const auto& name : names) {
    const CorpusEntry& entry = get_problem(name);
    if (selection.x0) {
      if (static_cast<int>(selection.x0->size()) != entry.dims.n)
        throw std::invalid_argument(fmt::format("{} needs a start point of length {}, got {}",
                                                entry.name, entry.dims.n, selection.x0->size()));
      run_one(entry, "custom", *selection.x0);
      continue;
    }
    for (char which : {'a', 'b'}) {
      if (selection.start != "all" && selection.start != std::string(1, which)) continue;
      if (const StartPoint* sp = entry.start(which)) run_one(entry, std::string(1, which), sp->x);
    }
  }
  return records;
}

std::string emit_table(std::span<const RunRecord> records, TableFormat format) {
  std::string out;
  const auto header = split(kResultsHeader, ',');
  if (format == TableFormat::Csv) {
    out += kResultsHeader;
    out += '\n';
  } else {
    out += fmt::format("| {} |\n", fmt::join(header, " | "));
    out += '|';
    for (std::size_t i = 0; i < header.size(); ++i) out += "---|";
    out += '\n';
  }
  for (const auto& r : records) {
    const std::vector<std::string> cells{
        r.problem,
        std::to_string(r.n),
        std::to_string(r.m1),
        std::to_string(r.m2),
        r.start,
        r.status,
        std::to_string(r.nio),
        std::to_string(r.nii),
        std::to_string(r.ni),
        std::to_string(r.nf0),
        std::to_string(r.nf),
        fmt::format("{:.12g}", r.fv),
        fmt::format("{:.6e}", r.kkt_residual),
        fmt::format("{:.6f}", r.cpu_seconds)};
    if (format == TableFormat::Csv)
      out += fmt::format("{}\n", fmt::join(cells, ","));
    else
      out += fmt::format("| {} |\n", fmt::join(cells, " | "));
  }
  return out;
}

std::vector<RunRecord> parse_results_csv(std::string_view text) {
  std::vector<RunRecord> records;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader)
    throw std::runtime_error("results CSV: missing or unexpected header");
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 14)
      throw std::runtime_error(fmt::format("results CSV line {}: expected 14 fields, got {}",
                                           line_no, cells.size()));
    try {
      RunRecord r;
      r.problem = cells[0];
      r.n = std::stoi(cells[1]);
      r.m1 = std::stoi(cells[2]);
      r.m2 = std::stoi(cells[3]);
      r.start = cells[4];
      r.status = cells[5];
      r.nio = std::stoi(cells[6]);
      r.nii = std::stoi(cells[7]);
      r.ni = std::stoi(cells[8]);
      r.nf0 = std::stol(cells[9]);
      r.nf = std::stol(cells[10]);
      r.fv = std::stod(cells[11]);
      r.kkt_residual = std::stod(cells[12]);
      r.phi_final = std::numeric_limits<double>::quiet_NaN();
      r.cpu_seconds = std::stod(cells[13]);
      records.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw std::runtime_error(fmt::format("results CSV line {}: malformed number", line_no));
    }
  }
  return records;
}

std::optional<ProfileMetric> parse_metric(std::string_view name) {
  if (name == "ni") return ProfileMetric::Ni;
  if (name == "nf0") return ProfileMetric::Nf0;
  if (name == "cpu") return ProfileMetric::Cpu;
  return std::nullopt;
}

std::vector<ProfileCurve> compute_profiles(
    const std::map<std::string, std::vector<RunRecord>>& records_by_label, ProfileMetric metric) {
  using Key = std::pair<std::string, std::string>;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::map<std::string, std::map<Key, double>> cost;
  for (const auto& [label, records] : records_by_label) {
    auto& table = cost[label];
    for (const auto& r : records) {
      const double v = r.converged() ? metric_value(r, metric) : kInf;
      if (!table.emplace(Key{r.problem, r.start}, v).second)
        throw InconsistentRecords(
            fmt::format("solver '{}' has two runs of {} start {}", label, r.problem, r.start));
    }
  }
  if (cost.empty()) return {};

  std::set<Key> problems;
  for (const auto& [key, v] : cost.begin()->second) problems.insert(key);
  for (const auto& [label, table] : cost) {
    std::set<Key> mine;
    for (const auto& [key, v] : table) mine.insert(key);
    if (mine != problems)
      throw InconsistentRecords(
          fmt::format("solver '{}' covers a different problem set than '{}'", label,
                      cost.begin()->first));
  }

  std::map<std::string, std::vector<double>> ratios;
  std::set<double> taus{1.0};
  for (const auto& key : problems) {
    double best = kInf;
    for (const auto& [label, table] : cost) best = std::min(best, table.at(key));
    for (const auto& [label, table] : cost) {
      const double v = table.at(key);
      double r = kInf;
      if (std::isfinite(v)) r = best > 0.0 ? v / best : (v == 0.0 ? 1.0 : kInf);
      ratios[label].push_back(r);
      if (std::isfinite(r)) taus.insert(r);
    }
  }

  const double total = static_cast<double>(problems.size());
  std::vector<ProfileCurve> curves;
  for (auto& [label, rs] : ratios) {
    std::sort(rs.begin(), rs.end());
    ProfileCurve curve{label, {}};
    for (double tau : taus) {
      const auto within = std::upper_bound(rs.begin(), rs.end(), tau) - rs.begin();
      curve.points.push_back({tau, static_cast<double>(within) / total});
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::string emit_profile_csv(std::span<const ProfileCurve> curves) {
  std::vector<const ProfileCurve*> sorted;
  for (const auto& c : curves) sorted.push_back(&c);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->solver_label < b->solver_label; });
  std::string out = "solver,tau,rho\n";
  for (const auto* c : sorted)
    for (const auto& pt : c->points)
      out += fmt::format("{},{:.12g},{:.12g}\n", c->solver_label, pt.tau, pt.rho);
  return out;
}

std::vector<std::string> option_names() {
  std::vector<std::string> names;
  for (const auto& f : kFields) names.emplace_back(f.name);
  names.emplace_back("max_iter");
  return names;
}

bool set_option(SolverOptions& options, std::string_view name, double value) {
  if (name == "max_iter") {
    options.max_iter = static_cast<int>(value);
    return true;
  }
  for (const auto& f : kFields)
    if (name == f.name) {
      options.*f.member = value;
      return true;
    }
  return false;
}

SolverOptions apply_config_json(SolverOptions base, std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(fmt::format("config: {}", e.what()));
  }
  if (!doc.is_object()) throw std::runtime_error("config: expected a flat JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_number())
      throw std::runtime_error(fmt::format("config: value of '{}' is not a number", key));
    if (!set_option(base, key, value.get<double>()))
      throw std::runtime_error(fmt::format("config: unknown option '{}'", key));
  }
  return base;
}

}  // namespace isqp
