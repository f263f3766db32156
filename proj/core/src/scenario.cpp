#include "pdcontract/scenario.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pdcontract/errors.hpp"

namespace pdc {

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::standard: return "standard";
    case ScenarioKind::augmented: return "augmented";
    case ScenarioKind::distributed: return "distributed";
    case ScenarioKind::distributed_ls: return "distributed-ls";
    case ScenarioKind::tv: return "tv";
    case ScenarioKind::tv_distributed: return "tv-distributed";
  }
  return "unknown";
}

ScenarioKind scenario_kind_from_string(const std::string& text) {
  if (text == "standard") return ScenarioKind::standard;
  if (text == "augmented") return ScenarioKind::augmented;
  if (text == "distributed") return ScenarioKind::distributed;
  if (text == "distributed-ls") return ScenarioKind::distributed_ls;
  if (text == "tv") return ScenarioKind::tv;
  if (text == "tv-distributed") return ScenarioKind::tv_distributed;
  throw Error("unknown scenario kind '" + text + "'");
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("failed to parse " + path + ": " + e.what());
  }

  Scenario s;
  if (!j.contains("kind")) throw Error(path + ": missing 'kind'");
  s.kind = scenario_kind_from_string(j.at("kind").get<std::string>());

  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  s.name = std::filesystem::path(path).stem().string();

  auto resolve = [&](const std::string& rel) {
    std::filesystem::path p(rel);
    if (p.is_absolute()) return p.string();
    return (base / p).string();
  };

  if (!j.contains("problem")) throw Error(path + ": missing 'problem'");
  s.problem_path = resolve(j.at("problem").get<std::string>());
  if (!std::filesystem::exists(s.problem_path)) {
    throw Error(path + ": problem file not found: " + s.problem_path);
  }

  const bool needs_graph = s.kind == ScenarioKind::distributed ||
                           s.kind == ScenarioKind::distributed_ls ||
                           s.kind == ScenarioKind::tv_distributed;
  if (needs_graph) {
    if (!j.contains("graph")) throw Error(path + ": distributed kinds require 'graph'");
    s.graph_path = resolve(j.at("graph").get<std::string>());
    if (!std::filesystem::exists(s.graph_path)) {
      throw Error(path + ": graph file not found: " + s.graph_path);
    }
  }

  s.epsilon = j.value("epsilon", 0.9);
  s.rho = j.value("rho", 1.0);
  s.step = j.value("h", 0.0);
  s.horizon = j.value("T", 0.0);
  s.seed = j.value("seed", std::uint64_t{1});
  s.start_at_equilibrium = j.value("start", std::string("random")) == std::string("equilibrium");

  if (!(s.epsilon > 0.0) || !(s.epsilon < 1.0)) throw Error(path + ": epsilon must lie in (0,1)");
  if (!(s.rho > 0.0)) throw Error(path + ": rho must be positive");
  if (s.step < 0.0 || s.horizon < 0.0) throw Error(path + ": h and T must be nonnegative");
  return s;
}

void Report::add(const std::string& key, double value) { constants.emplace_back(key, value); }

double Report::value_of(const std::string& key) const {
  for (const auto& [k, v] : constants) {
    if (k == key) return v;
  }
  throw Error("Report: no constant named '" + key + "'");
}

void Report::check_le(const std::string& name, double value, double threshold) {
  checks.push_back({name, value, threshold, value <= threshold});
}

void Report::check_ge(const std::string& name, double value, double threshold) {
  checks.push_back({name, value, threshold, value >= threshold});
}

bool Report::all_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

std::string Report::to_json() const {
  nlohmann::ordered_json j;
  j["scenario"] = scenario;
  j["command"] = command;
  j["kind"] = kind;
  for (const auto& [k, v] : constants) j[k] = v;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["value"] = c.value;
    e["threshold"] = c.threshold;
    e["pass"] = c.pass;
    j["checks"].push_back(e);
  }
  return j.dump(2);
}

std::string Report::to_csv() const {
  std::ostringstream out;
  char buf[32];
  out << "key,value\n";
  out << "scenario," << scenario << "\n";
  out << "command," << command << "\n";
  out << "kind," << kind << "\n";
  for (const auto& [k, v] : constants) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << k << ',' << buf << "\n";
  }
  out << "check,value,threshold,pass\n";
  for (const auto& c : checks) {
    std::snprintf(buf, sizeof(buf), "%.17g", c.value);
    out << c.name << ',' << buf;
    std::snprintf(buf, sizeof(buf), "%.17g", c.threshold);
    out << ',' << buf << ',' << (c.pass ? "true" : "false") << "\n";
  }
  return out.str();
}

}  // namespace pdc
