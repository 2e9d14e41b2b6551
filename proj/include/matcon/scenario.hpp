#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "matcon/switching.hpp"

namespace matcon {

struct RunSettings {
  double t_end = 60.0;
  double sample_dt = 0.1;
  double q_threshold = 0.99;
  std::optional<Index> horizon;  // segments; defaults to three periods / the whole signal
  double oracle_step = 1e-3;

  friend bool operator==(const RunSettings&, const RunSettings&) = default;
};

/// In-memory form of a scenario document. Node labels are 1-based on disk and
/// 0-based here.
struct Scenario {
  GraphDimensions dims;
  std::vector<std::string> graph_names;
  std::vector<MatrixWeightedGraph<double>> graphs;
  std::vector<Segment<double>> segments;
  bool periodic = false;
  double alpha = 0;
  double beta = 0;
  std::optional<Vector<double>> initial_state;
  RunSettings run;
  Tolerances<double> tolerances;

  SwitchingSignal<double> signal() const;
  /// Throws InvalidSignal when the scenario is not periodic.
  PeriodicSignal<double> periodic_signal() const;
  double period() const;
};

bool operator==(const Scenario& a, const Scenario& b);

Scenario parse_scenario(const nlohmann::json& doc);
/// Parses text; JSON syntax errors report line and column.
Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

nlohmann::json to_json(const Scenario& s);
nlohmann::json to_json(const Tolerances<double>& tol);

/// Builds every derived object, so the dwell bounds (and the periodic rules) are
/// checked. Throws on the first violation.
void validate(const Scenario& s);

}  // namespace matcon
