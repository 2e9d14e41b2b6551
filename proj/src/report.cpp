#include "matcon/report.hpp"

#include <cmath>
#include <sstream>

namespace matcon {

using nlohmann::json;

namespace {

json edge_list(const std::vector<EdgeKey>& edges) {
  json out = json::array();
  for (const auto& [i, j] : edges) out.push_back({i + 1, j + 1});
  return out;
}

json tree_json(const SpanningTree& tree) {
  json out = {{"exists", tree.exists}};
  if (tree.exists) out["edges"] = edge_list(tree.edges);
  return out;
}

json vector_json(const Vector<double>& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json node_rows(const Vector<double>& x, const GraphDimensions& dims) {
  json out = json::array();
  for (Index i = 0; i < dims.n; ++i) out.push_back(vector_json(x.segment(i * dims.d, dims.d)));
  return out;
}

json matrix_rows(const Matrix<double>& m) {
  json out = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

json certificate_json(const Certificate<double>& cert) {
  return std::visit(
      [](const auto& c) -> json {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, NullSpaceEqualsR>) {
          return {{"type", "NullSpaceEqualsR"}, {"null_dimension", c.null_dimension}};
        } else if constexpr (std::is_same_v<T, PositiveSpanningTree>) {
          return {{"type", "PositiveSpanningTree"}, {"edges", edge_list(c.edges)}};
        } else if constexpr (std::is_same_v<T, UniformContraction<double>>) {
          return {{"type", "UniformContraction"}, {"q", c.q}, {"worst_mu", c.worst_mu}};
        } else if constexpr (std::is_same_v<T, NullSpaceObstruction<double>>) {
          return {{"type", "NullSpaceObstruction"},
                  {"witness", vector_json(c.witness)},
                  {"segments", {c.first, c.last}},
                  {"span", {c.begin, c.end}},
                  {"null_dimension", c.null_dimension}};
        } else {
          json out = {{"type", "HorizonExhausted"}, {"horizon", c.horizon}};
          if (c.worst_mu) out["worst_mu"] = *c.worst_mu;
          return out;
        }
      },
      cert);
}

}  // namespace

json to_json(const Verdict<double>& v) {
  json out = {{"decision", std::string(to_string(v.decision))}};
  if (v.horizon) out["horizon"] = *v.horizon;
  json certs = json::array();
  for (const auto& c : v.certificates) certs.push_back(certificate_json(c));
  out["certificates"] = std::move(certs);
  if (!v.windows.empty()) {
    json windows = json::array();
    for (const auto& w : v.windows) {
      json wj = {{"segments", {w.first, w.last}}, {"span", {w.begin, w.end}}, {"closed", w.closed}};
      if (w.mu_next) wj["mu_next"] = *w.mu_next;
      windows.push_back(std::move(wj));
    }
    out["windows"] = std::move(windows);
  }
  return out;
}

json analyze(const Scenario& sc, const AnalyzeOptions& opt) {
  validate(sc);
  const auto& tol = sc.tolerances;
  const auto signal = sc.signal();
  json report = json::object();
  report["dimensions"] = {{"n", sc.dims.n}, {"d", sc.dims.d}};
  report["tolerances"] = to_json(tol);

  json graphs = json::array();
  for (std::size_t g = 0; g < sc.graphs.size(); ++g) {
    const auto ns = null_space_basis(signal.graph_laplacian(static_cast<Index>(g)), sc.dims, tol);
    graphs.push_back({{"name", sc.graph_names[g]},
                      {"edges", sc.graphs[g].edge_count()},
                      {"null_dimension", ns.dimension},
                      {"equals_consensus", ns.equals_consensus},
                      {"positive_spanning_tree", tree_json(positive_spanning_tree(sc.graphs[g]))}});
  }
  report["graphs"] = std::move(graphs);

  const double total = signal.total_duration();
  const auto [begin, end] = opt.span.value_or(std::make_pair(0.0, total));
  const auto net = sc.periodic ? integral_network(sc.periodic_signal(), begin, end, tol)
                               : integral_network(signal, begin, end, tol);
  {
    const auto ns = null_space_basis(net.avg_laplacian.matrix, sc.dims, tol);
    json edges = json::array();
    for (const auto& [ij, w] : net.graph.edges())
      edges.push_back({{"i", ij.first + 1},
                       {"j", ij.second + 1},
                       {"class", std::string(to_string(w.kind))},
                       {"weight", matrix_rows(w.entries)}});
    json time_share = json::object();
    for (std::size_t g = 0; g < sc.graphs.size(); ++g) time_share[sc.graph_names[g]] = net.graph_weights[g];
    report["integral_network"] = {{"span", {begin, end}},
                                  {"time_share", std::move(time_share)},
                                  {"edges", std::move(edges)},
                                  {"null_dimension", ns.dimension},
                                  {"equals_consensus", ns.equals_consensus},
                                  {"positive_spanning_tree", tree_json(positive_spanning_tree(net))}};
  }

  const double q = opt.q_threshold.value_or(sc.run.q_threshold);
  const Index horizon = opt.horizon.value_or(
      sc.run.horizon.value_or(sc.periodic ? 3 * signal.segment_count() : signal.segment_count()));
  const auto scanned = sc.periodic ? sc.periodic_signal().unroll_segments(horizon) : signal;

  json verdicts = json::object();
  Decision decision = Decision::Inconclusive;
  if (sc.periodic) {
    const auto psig = sc.periodic_signal();
    const auto v = periodic_consensus_verdict(psig, tol);
    auto vj = to_json(v);
    vj["period"] = psig.period();
    vj["period_mu_next"] =
        contraction_factor(transition_matrix(psig.base(), 0, psig.partitions(), tol), sc.dims.d, tol).mu_next;
    verdicts["periodic"] = std::move(vj);
    decision = v.decision;
  }
  const auto necessary = necessary_condition_scan(scanned, horizon, tol);
  const auto sufficient = sufficient_condition_certificate(scanned, horizon, q, tol);
  verdicts["necessary"] = to_json(necessary);
  verdicts["sufficient"] = to_json(sufficient);
  if (!sc.periodic) {
    if (sufficient.decision == Decision::Consensus)
      decision = Decision::Consensus;
    else if (necessary.decision == Decision::NoConsensus)
      decision = Decision::NoConsensus;
  }
  report["decision"] = std::string(to_string(decision));
  report["verdicts"] = std::move(verdicts);
  report["scenario"] = to_json(sc);
  return report;
}

namespace {

std::string num(const json& v) { return v.is_number_float() ? format_number(v.get<double>()) : v.dump(); }

std::string edges_text(const json& edges) {
  std::string out;
  for (const auto& e : edges) {
    if (!out.empty()) out += ' ';
    out += "(" + e[0].dump() + "," + e[1].dump() + ")";
  }
  return out;
}

void verdict_text(std::ostream& os, const std::string& label, const json& v) {
  os << label << ": " << v["decision"].get<std::string>();
  if (v.contains("horizon")) os << " (horizon " << v["horizon"].dump() << " segments)";
  os << '\n';
  if (v.contains("period_mu_next")) os << "  period contraction mu_{d+1} = " << num(v["period_mu_next"]) << '\n';
  for (const auto& c : v["certificates"]) {
    const auto type = c["type"].get<std::string>();
    os << "  certificate " << type;
    if (type == "NullSpaceEqualsR") os << ": null dimension " << c["null_dimension"].dump();
    if (type == "PositiveSpanningTree") os << ": " << edges_text(c["edges"]);
    if (type == "UniformContraction") os << ": q = " << num(c["q"]) << ", worst mu = " << num(c["worst_mu"]);
    if (type == "NullSpaceObstruction")
      os << ": span [" << num(c["span"][0]) << ", " << num(c["span"][1]) << "), null dimension "
         << c["null_dimension"].dump() << ", witness " << c["witness"].dump();
    if (type == "HorizonExhausted" && c.contains("worst_mu")) os << ": worst mu = " << num(c["worst_mu"]);
    os << '\n';
  }
  if (v.contains("windows"))
    for (const auto& w : v["windows"]) {
      os << "  window [" << num(w["span"][0]) << ", " << num(w["span"][1]) << ") "
         << (w["closed"].get<bool>() ? "closed" : "open");
      if (w.contains("mu_next")) os << ", mu_{d+1} = " << num(w["mu_next"]);
      os << '\n';
    }
}

}  // namespace

std::string render_text(const json& r) {
  std::ostringstream os;
  os << "decision: " << r["decision"].get<std::string>() << '\n';
  os << "n = " << r["dimensions"]["n"].dump() << ", d = " << r["dimensions"]["d"].dump() << '\n';
  os << "\ngraphs:\n";
  for (const auto& g : r["graphs"]) {
    os << "  " << g["name"].get<std::string>() << ": " << g["edges"].dump() << (g["edges"] == 1 ? " edge" : " edges") << ", null dimension "
       << g["null_dimension"].dump() << (g["equals_consensus"].get<bool>() ? " (= R)" : " (!= R)")
       << ", positive spanning tree " << (g["positive_spanning_tree"]["exists"].get<bool>() ? "yes" : "no") << '\n';
  }
  const auto& net = r["integral_network"];
  os << "\nintegral network over [" << num(net["span"][0]) << ", " << num(net["span"][1]) << "):\n";
  for (const auto& e : net["edges"])
    os << "  (" << e["i"].dump() << "," << e["j"].dump() << ") " << e["class"].get<std::string>() << " "
       << e["weight"].dump() << '\n';
  os << "  null dimension " << net["null_dimension"].dump() << (net["equals_consensus"].get<bool>() ? " (= R)" : " (!= R)")
     << '\n';
  if (net["positive_spanning_tree"]["exists"].get<bool>())
    os << "  positive spanning tree " << edges_text(net["positive_spanning_tree"]["edges"]) << '\n';
  else
    os << "  no positive spanning tree\n";
  os << '\n';
  const auto& v = r["verdicts"];
  if (v.contains("periodic")) verdict_text(os, "periodic", v["periodic"]);
  verdict_text(os, "necessary (finite horizon)", v["necessary"]);
  verdict_text(os, "sufficient (finite horizon)", v["sufficient"]);
  os << "\ntolerances: " << r["tolerances"].dump() << '\n';
  return os.str();
}

SimulationResult run_simulation(const Scenario& sc, const SimulateOptions& opt) {
  validate(sc);
  if (!sc.initial_state) throw Error(ErrorCode::ParseError, "/initial_state: missing field");
  const auto& tol = sc.tolerances;
  const double t_end = opt.t_end.value_or(sc.run.t_end);
  const double sample_dt = opt.sample_dt.value_or(sc.run.sample_dt);
  const auto& x0 = *sc.initial_state;

  SimulationResult result;
  result.trajectory = sc.periodic ? simulate(sc.periodic_signal(), x0, t_end, sample_dt, tol)
                                  : simulate(sc.signal(), x0, t_end, sample_dt, tol);
  const auto& traj = result.trajectory;
  json summary = {{"t_end", t_end},
                  {"sample_dt", sample_dt},
                  {"samples", traj.size()},
                  {"consensus_point", vector_json(traj.consensus.node_mean)},
                  {"final_states", node_rows(traj.states.back(), sc.dims)},
                  {"disagreement_norm", std::sqrt(traj.disagreement.back())},
                  {"mean_drift", mean_drift(traj)},
                  {"monotonicity_violation", monotonicity_violation(traj)}};
  if (opt.oracle) {
    const auto rk = sc.periodic ? rk4_reference(sc.periodic_signal(), x0, t_end, sc.run.oracle_step, sample_dt)
                                : rk4_reference(sc.signal(), x0, t_end, sc.run.oracle_step, sample_dt);
    const double dev = max_deviation(traj, rk);
    result.oracle_diverged = !(dev <= tol.oracle);
    summary["oracle"] = {{"method", "rk4"},
                         {"step", sc.run.oracle_step},
                         {"max_deviation", dev},
                         {"bound", tol.oracle},
                         {"within_bound", !result.oracle_diverged}};
  }
  result.summary = std::move(summary);
  return result;
}

}  // namespace matcon
