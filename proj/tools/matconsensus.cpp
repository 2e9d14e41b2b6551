#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "matcon/report.hpp"

namespace {

int exit_code(const matcon::Error& e) {
  switch (e.code()) {
    case matcon::ErrorCode::ParseError:
      return 1;
    case matcon::ErrorCode::OracleDivergence:
      return 3;
    default:
      return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consensus analysis and simulation for matrix-weighted switching networks"};
  app.require_subcommand(1);

  std::string path;
  auto* validate = app.add_subcommand("validate", "Parse a scenario and check every assumption");
  validate->add_option("scenario", path, "Scenario JSON file")->required();

  matcon::AnalyzeOptions aopt;
  std::vector<double> span;
  std::string format = "json";
  auto* analyze = app.add_subcommand("analyze", "Report null spaces, spanning trees and consensus verdicts");
  analyze->add_option("scenario", path, "Scenario JSON file")->required();
  analyze->add_option("--span", span, "Integral network interval: BEGIN END")->expected(2);
  analyze->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
  analyze->add_option("--q", aopt.q_threshold, "Contraction threshold in (0, 1)");
  analyze->add_option("--horizon", aopt.horizon, "Number of segments scanned");

  matcon::SimulateOptions sopt;
  std::string out_path;
  auto* simulate = app.add_subcommand("simulate", "Integrate the protocol and write the trajectory as CSV");
  simulate->add_option("scenario", path, "Scenario JSON file")->required();
  simulate->add_option("--t-end", sopt.t_end, "Final time");
  simulate->add_option("--sample-dt", sopt.sample_dt, "Sampling interval");
  simulate->add_flag("--oracle", sopt.oracle, "Cross-check against an RK4 reference");
  simulate->add_option("--out", out_path, "CSV output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const auto scenario = matcon::load_scenario(path);
    if (*validate) {
      matcon::validate(scenario);
      std::cout << "ok: n = " << scenario.dims.n << ", d = " << scenario.dims.d << ", "
                << scenario.segments.size() << " segments" << (scenario.periodic ? ", periodic" : "") << '\n';
      return 0;
    }
    if (*analyze) {
      if (!span.empty()) aopt.span = std::make_pair(span[0], span[1]);
      const auto report = matcon::analyze(scenario, aopt);
      if (format == "text")
        std::cout << matcon::render_text(report);
      else
        std::cout << report.dump(2) << '\n';
      return 0;
    }
    const auto result = matcon::run_simulation(scenario, sopt);
    if (out_path.empty()) {
      matcon::write_csv(std::cout, result.trajectory);
      std::cerr << result.summary.dump(2) << '\n';
    } else {
      std::ofstream out(out_path);
      if (!out) throw matcon::Error(matcon::ErrorCode::ParseError, "cannot open " + out_path);
      matcon::write_csv(out, result.trajectory);
      std::cout << result.summary.dump(2) << '\n';
    }
    if (result.oracle_diverged) {
      std::cerr << "error: " << matcon::to_string(matcon::ErrorCode::OracleDivergence)
                << ": simulation and RK4 reference differ beyond the oracle tolerance\n";
      return 3;
    }
    return 0;
  } catch (const matcon::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  }
}
