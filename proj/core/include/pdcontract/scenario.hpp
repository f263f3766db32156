#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace pdc {

enum class ScenarioKind { standard, augmented, distributed, distributed_ls, tv, tv_distributed };

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& text);

/// A batch experiment description loaded from a JSON scenario file.
/// problem/graph paths are resolved relative to the scenario file.
struct Scenario {
  ScenarioKind kind = ScenarioKind::standard;
  std::string name;
  std::string problem_path;
  std::string graph_path;
  double epsilon = 0.9;
  double rho = 1.0;
  double step = 0.0;        // 0: default stability rule
  double horizon = 0.0;     // 0: default per kind
  std::uint64_t seed = 1;
  bool start_at_equilibrium = false;
};

Scenario load_scenario(const std::string& path);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// Self-describing result of one command on one scenario: the certificate
/// constants that were used plus pass/fail check entries.
struct Report {
  std::string scenario;
  std::string command;
  std::string kind;
  std::vector<std::pair<std::string, double>> constants;
  std::vector<CheckResult> checks;

  void add(const std::string& key, double value);
  double value_of(const std::string& key) const;
  /// pass when value <= threshold
  void check_le(const std::string& name, double value, double threshold);
  /// pass when value >= threshold
  void check_ge(const std::string& name, double value, double threshold);
  bool all_pass() const;

  std::string to_json() const;
  std::string to_csv() const;
};

/// Certificate constants only; no integration.
Report cmd_rates(const Scenario& s);

/// Integrates the flow and writes the error time series as CSV
/// (t, weighted error, Euclidean error, KKT residual, dual-sum drift and
/// per-node error for distributed kinds, certified envelope).
Report cmd_simulate(const Scenario& s, std::ostream& csv_out);

/// Time-varying kinds: integrates, compares the measured weighted tracking
/// error against the certified bound curve, writes t,weighted_error,bound,
/// margin rows plus a "# max_violation,..." summary line.
Report cmd_track(const Scenario& s, std::ostream& csv_out);

/// Bundled verification checks for the scenario's kind.
Report cmd_verify(const Scenario& s);

}  // namespace pdc
