#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>

#include <json.hpp>

#include "matcon/scenario.hpp"
#include "matcon/simulator.hpp"

namespace matcon {

struct AnalyzeOptions {
  std::optional<std::pair<double, double>> span;
  std::optional<double> q_threshold;
  std::optional<Index> horizon;
};

/// Runs every applicable check on the scenario and collects the results,
/// the tolerances used and an echo of the scenario itself.
nlohmann::json analyze(const Scenario& scenario, const AnalyzeOptions& options = {});

/// Human-readable rendering of an analysis report.
std::string render_text(const nlohmann::json& report);

nlohmann::json to_json(const Verdict<double>& verdict);

struct SimulateOptions {
  std::optional<double> t_end;
  std::optional<double> sample_dt;
  bool oracle = false;
};

struct SimulationResult {
  Trajectory<double> trajectory;
  nlohmann::json summary;
  bool oracle_diverged = false;
};

SimulationResult run_simulation(const Scenario& scenario, const SimulateOptions& options);

/// Header `t,node,dim_1..dim_d,V`, one row per (sample, node), nodes 1-based.
void write_csv(std::ostream& out, const Trajectory<double>& trajectory);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

}  // namespace matcon
