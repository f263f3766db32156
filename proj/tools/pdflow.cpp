// pdflow: batch front end for primal-dual flow certificates, simulations
// and verification suites. Exit codes: 0 all checks pass, 1 a check failed,
// 2 input or assumption error.

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pdcontract/errors.hpp"
#include "pdcontract/scenario.hpp"

namespace {

#ifndef PDFLOW_SCENARIO_DIR
#define PDFLOW_SCENARIO_DIR ""
#endif

struct CommonOptions {
  std::string scenario_path;
  std::string out_path;
  std::string format = "json";
  double epsilon = -1.0;
  double rho = -1.0;
  double step = -1.0;
  double horizon = -1.0;
  long long seed = -1;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool scenario_required) {
  auto* s = cmd->add_option("--scenario", opt.scenario_path, "Scenario JSON file");
  if (scenario_required) s->required();
  cmd->add_option("--out", opt.out_path, "Output path (default: stdout)");
  cmd->add_option("--format", opt.format, "Report format: json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--epsilon", opt.epsilon, "Override scenario epsilon");
  cmd->add_option("--rho", opt.rho, "Override scenario augmentation gain");
  cmd->add_option("--h", opt.step, "Override integrator step");
  cmd->add_option("--T", opt.horizon, "Override integrator horizon");
  cmd->add_option("--seed", opt.seed, "Override scenario seed");
}

pdc::Scenario load_with_overrides(const CommonOptions& opt) {
  pdc::Scenario s = pdc::load_scenario(opt.scenario_path);
  if (opt.epsilon >= 0.0) s.epsilon = opt.epsilon;
  if (opt.rho >= 0.0) s.rho = opt.rho;
  if (opt.step >= 0.0) s.step = opt.step;
  if (opt.horizon >= 0.0) s.horizon = opt.horizon;
  if (opt.seed >= 0) s.seed = static_cast<std::uint64_t>(opt.seed);
  return s;
}

void emit_report(const pdc::Report& report, const CommonOptions& opt) {
  const std::string text = opt.format == "csv" ? report.to_csv() : report.to_json();
  if (opt.out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream out(opt.out_path);
    if (!out) throw pdc::Error("cannot open output path " + opt.out_path);
    out << text << "\n";
  }
}

std::vector<std::string> scenario_files(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

int run_verify_all(const std::string& dir, const CommonOptions& opt) {
  const auto files = scenario_files(dir);
  if (files.empty()) throw pdc::Error("no scenario files found in " + dir);

  // Scenarios are independent; run them concurrently and print in order.
  std::vector<std::future<pdc::Report>> futures;
  futures.reserve(files.size());
  for (const auto& file : files) {
    futures.push_back(std::async(std::launch::async, [file]() {
      return pdc::cmd_verify(pdc::load_scenario(file));
    }));
  }
  bool all_pass = true;
  for (std::size_t i = 0; i < files.size(); ++i) {
    pdc::Report report;
    try {
      report = futures[i].get();
    } catch (const pdc::Error& e) {
      std::cerr << files[i] << ": " << e.what() << "\n";
      return 2;
    }
    emit_report(report, opt);
    for (const auto& check : report.checks) {
      std::cerr << report.scenario << " [" << (check.pass ? "PASS" : "FAIL") << "] " << check.name
                << "\n";
    }
    all_pass = all_pass && report.all_pass();
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"primal-dual flow rates, simulations and verification"};
  app.require_subcommand(1);

  CommonOptions rates_opt, sim_opt, track_opt, verify_opt;
  std::string scenario_dir;

  auto* rates = app.add_subcommand("rates", "Print certificate constants for a scenario");
  add_common(rates, rates_opt, true);

  auto* simulate = app.add_subcommand("simulate", "Integrate the flow and write the error CSV");
  add_common(simulate, sim_opt, true);

  auto* track = app.add_subcommand("track", "Run a tv scenario against its tracking bound");
  add_common(track, track_opt, true);

  auto* verify = app.add_subcommand(
      "verify", "Run the bundled checks (all shipped scenarios when --scenario is omitted)");
  add_common(verify, verify_opt, false);
  verify->add_option("--scenario-dir", scenario_dir, "Directory of scenario files for the full suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (rates->parsed()) {
      emit_report(pdc::cmd_rates(load_with_overrides(rates_opt)), rates_opt);
      return 0;
    }
    if (simulate->parsed()) {
      const pdc::Scenario s = load_with_overrides(sim_opt);
      pdc::Report report;
      if (sim_opt.out_path.empty()) {
        report = pdc::cmd_simulate(s, std::cout);
      } else {
        std::ofstream out(sim_opt.out_path);
        if (!out) throw pdc::Error("cannot open output path " + sim_opt.out_path);
        report = pdc::cmd_simulate(s, out);
      }
      std::cerr << (sim_opt.format == "csv" ? report.to_csv() : report.to_json()) << "\n";
      return report.all_pass() ? 0 : 1;
    }
    if (track->parsed()) {
      const pdc::Scenario s = load_with_overrides(track_opt);
      pdc::Report report;
      if (track_opt.out_path.empty()) {
        report = pdc::cmd_track(s, std::cout);
      } else {
        std::ofstream out(track_opt.out_path);
        if (!out) throw pdc::Error("cannot open output path " + track_opt.out_path);
        report = pdc::cmd_track(s, out);
      }
      std::cerr << (track_opt.format == "csv" ? report.to_csv() : report.to_json()) << "\n";
      return report.all_pass() ? 0 : 1;
    }
    if (verify->parsed()) {
      if (!verify_opt.scenario_path.empty()) {
        const pdc::Report report = pdc::cmd_verify(load_with_overrides(verify_opt));
        emit_report(report, verify_opt);
        return report.all_pass() ? 0 : 1;
      }
      std::string dir = scenario_dir;
      if (dir.empty()) {
        if (std::filesystem::exists("scenarios")) {
          dir = "scenarios";
        } else {
          dir = PDFLOW_SCENARIO_DIR;
        }
      }
      if (dir.empty() || !std::filesystem::exists(dir)) {
        throw pdc::Error("no scenario directory found; pass --scenario or --scenario-dir");
      }
      return run_verify_all(dir, verify_opt);
    }
  } catch (const pdc::AssumptionError& e) {
    std::cerr << "assumption violated " << e.what() << "\n";
    return 2;
  } catch (const pdc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
