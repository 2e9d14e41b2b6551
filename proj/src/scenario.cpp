#include "matcon/scenario.hpp"

#include <fstream>
#include <sstream>

namespace matcon {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ParseError, path + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "/" + key, "missing field");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

Index integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<Index>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& path) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, path + "/" + key);
}

/// Accepts nested rows [[..],[..]] or a flat row-major list of d*d numbers.
Matrix<double> square(const json& v, Index d, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  Matrix<double> m(d, d);
  if (!v.empty() && v[0].is_number()) {
    if (v.size() != static_cast<std::size_t>(d * d)) fail(path, "expected " + std::to_string(d * d) + " numbers");
    for (Index k = 0; k < d * d; ++k) m(k / d, k % d) = number(v[k], path + "/" + std::to_string(k));
    return m;
  }
  if (v.size() != static_cast<std::size_t>(d)) fail(path, "expected " + std::to_string(d) + " rows");
  for (Index r = 0; r < d; ++r) {
    const auto rp = path + "/" + std::to_string(r);
    const auto& row = v[r];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(d))
      fail(rp, "expected a row of " + std::to_string(d) + " numbers");
    for (Index c = 0; c < d; ++c) m(r, c) = number(row[c], rp + "/" + std::to_string(c));
  }
  return m;
}

Tolerances<double> parse_tolerances(const json& obj, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  Tolerances<double> t;
  const std::pair<const char*, double*> fields[] = {
      {"symmetry", &t.symmetry}, {"definiteness", &t.definiteness}, {"null_space", &t.null_space},
      {"eigen", &t.eigen},       {"mu", &t.mu},                     {"monotone", &t.monotone},
      {"mean", &t.mean},         {"oracle", &t.oracle}};
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const auto& [key, slot] : fields)
      if (it.key() == key) {
        *slot = number(it.value(), path + "/" + key);
        if (!(*slot > 0)) fail(path + "/" + key, "tolerance must be positive");
        known = true;
      }
    if (!known) fail(path + "/" + it.key(), "unknown tolerance");
  }
  return t;
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  Scenario s;
  if (!doc.is_object()) fail("", "scenario must be a JSON object");

  if (auto it = doc.find("tolerances"); it != doc.end()) s.tolerances = parse_tolerances(*it, "/tolerances");

  const auto& dims = require(doc, "dimensions", "");
  try {
    s.dims = GraphDimensions(integer(require(dims, "n", "/dimensions"), "/dimensions/n"),
                             integer(require(dims, "d", "/dimensions"), "/dimensions/d"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    fail("/dimensions", e.what());
  }
  const Index d = s.dims.d;

  const auto& graphs = require(doc, "graphs", "");
  if (!graphs.is_array() || graphs.empty()) fail("/graphs", "expected a non-empty array");
  for (std::size_t g = 0; g < graphs.size(); ++g) {
    const auto gp = "/graphs/" + std::to_string(g);
    const auto& name = require(graphs[g], "name", gp);
    if (!name.is_string()) fail(gp + "/name", "expected a string");
    for (const auto& seen : s.graph_names)
      if (seen == name.get<std::string>()) fail(gp + "/name", "duplicate graph name");
    s.graph_names.push_back(name.get<std::string>());

    MatrixWeightedGraph<double> graph(s.dims);
    const auto& edges = require(graphs[g], "edges", gp);
    if (!edges.is_array()) fail(gp + "/edges", "expected an array");
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto ep = gp + "/edges/" + std::to_string(e);
      const Index i = integer(require(edges[e], "i", ep), ep + "/i");
      const Index j = integer(require(edges[e], "j", ep), ep + "/j");
      const auto w = square(require(edges[e], "weight", ep), d, ep + "/weight");
      if (graph.edge(i - 1, j - 1)) fail(ep, "duplicate edge");
      try {
        graph.set_edge(i - 1, j - 1, w, s.tolerances);
      } catch (const Error& err) {
        throw Error(err.code(), ep + ": " + err.what());
      }
    }
    s.graphs.push_back(std::move(graph));
  }

  const auto& signal = require(doc, "signal", "");
  const auto& segs = require(signal, "segments", "/signal");
  if (!segs.is_array()) fail("/signal/segments", "expected an array");
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const auto sp = "/signal/segments/" + std::to_string(k);
    const auto& ref = require(segs[k], "graph", sp);
    if (!ref.is_string()) fail(sp + "/graph", "expected a graph name");
    auto found = std::find(s.graph_names.begin(), s.graph_names.end(), ref.get<std::string>());
    if (found == s.graph_names.end()) fail(sp + "/graph", "unknown graph '" + ref.get<std::string>() + "'");
    s.segments.push_back({static_cast<Index>(found - s.graph_names.begin()),
                          number(require(segs[k], "dwell", sp), sp + "/dwell")});
  }
  if (auto it = signal.find("periodic"); it != signal.end()) {
    if (!it->is_boolean()) fail("/signal/periodic", "expected true or false");
    s.periodic = it->get<bool>();
  }
  s.alpha = number(require(signal, "alpha", "/signal"), "/signal/alpha");
  s.beta = number(require(signal, "beta", "/signal"), "/signal/beta");

  if (auto it = doc.find("initial_state"); it != doc.end()) {
    const auto& rows = *it;
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(s.dims.n))
      fail("/initial_state", "expected " + std::to_string(s.dims.n) + " node states");
    Vector<double> x(s.dims.size());
    for (Index i = 0; i < s.dims.n; ++i) {
      const auto rp = "/initial_state/" + std::to_string(i);
      if (!rows[i].is_array() || rows[i].size() != static_cast<std::size_t>(d))
        fail(rp, "expected " + std::to_string(d) + " numbers");
      for (Index c = 0; c < d; ++c) x(i * d + c) = number(rows[i][c], rp + "/" + std::to_string(c));
    }
    s.initial_state = std::move(x);
  }

  if (auto it = doc.find("run"); it != doc.end()) {
    const auto& run = *it;
    if (!run.is_object()) fail("/run", "expected an object");
    s.run.t_end = number_or(run, "t_end", s.run.t_end, "/run");
    s.run.sample_dt = number_or(run, "sample_dt", s.run.sample_dt, "/run");
    s.run.q_threshold = number_or(run, "q_threshold", s.run.q_threshold, "/run");
    s.run.oracle_step = number_or(run, "oracle_step", s.run.oracle_step, "/run");
    if (auto h = run.find("horizon"); h != run.end()) s.run.horizon = integer(*h, "/run/horizon");
  }
  return s;
}

Scenario parse_scenario_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line) + " column " + std::to_string(column) + ": invalid JSON");
  }
  return parse_scenario(doc);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

SwitchingSignal<double> Scenario::signal() const {
  return build_switching_signal(graphs, segments, alpha, beta);
}

double Scenario::period() const {
  double total = 0;
  for (const auto& seg : segments) total += seg.dwell;
  return total;
}

PeriodicSignal<double> Scenario::periodic_signal() const {
  if (!periodic) throw Error(ErrorCode::InvalidSignal, "scenario is not periodic");
  return build_periodic_signal(signal(), period());
}

void validate(const Scenario& s) {
  if (s.periodic)
    s.periodic_signal();
  else
    s.signal();
}

bool operator==(const Scenario& a, const Scenario& b) {
  if (!(a.dims == b.dims) || a.graph_names != b.graph_names || a.periodic != b.periodic ||
      a.alpha != b.alpha || a.beta != b.beta || !(a.run == b.run))
    return false;
  if (a.segments.size() != b.segments.size() || a.graphs.size() != b.graphs.size()) return false;
  for (std::size_t k = 0; k < a.segments.size(); ++k)
    if (a.segments[k].graph != b.segments[k].graph || a.segments[k].dwell != b.segments[k].dwell) return false;
  for (std::size_t g = 0; g < a.graphs.size(); ++g) {
    const auto& ea = a.graphs[g].edges();
    const auto& eb = b.graphs[g].edges();
    if (ea.size() != eb.size()) return false;
    for (auto ia = ea.begin(), ib = eb.begin(); ia != ea.end(); ++ia, ++ib)
      if (ia->first != ib->first || ia->second.entries != ib->second.entries || ia->second.kind != ib->second.kind)
        return false;
  }
  if (a.initial_state.has_value() != b.initial_state.has_value()) return false;
  if (a.initial_state && *a.initial_state != *b.initial_state) return false;
  const auto& ta = a.tolerances;
  const auto& tb = b.tolerances;
  return ta.symmetry == tb.symmetry && ta.definiteness == tb.definiteness && ta.null_space == tb.null_space &&
         ta.eigen == tb.eigen && ta.mu == tb.mu && ta.monotone == tb.monotone && ta.mean == tb.mean &&
         ta.oracle == tb.oracle;
}

json to_json(const Tolerances<double>& t) {
  json out = json::object();
  out["symmetry"] = t.symmetry;
  out["definiteness"] = t.definiteness;
  out["null_space"] = t.null_space;
  out["eigen"] = t.eigen;
  out["mu"] = t.mu;
  out["monotone"] = t.monotone;
  out["mean"] = t.mean;
  out["oracle"] = t.oracle;
  return out;
}

json to_json(const Scenario& s) {
  json out = json::object();
  out["dimensions"] = {{"n", s.dims.n}, {"d", s.dims.d}};
  json graphs = json::array();
  for (std::size_t g = 0; g < s.graphs.size(); ++g) {
    json edges = json::array();
    for (const auto& [ij, w] : s.graphs[g].edges()) {
      json rows = json::array();
      for (Index r = 0; r < w.entries.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < w.entries.cols(); ++c) row.push_back(w.entries(r, c));
        rows.push_back(std::move(row));
      }
      edges.push_back({{"i", ij.first + 1}, {"j", ij.second + 1}, {"weight", std::move(rows)}});
    }
    graphs.push_back({{"name", s.graph_names[g]}, {"edges", std::move(edges)}});
  }
  out["graphs"] = std::move(graphs);

  json segs = json::array();
  for (const auto& seg : s.segments) segs.push_back({{"graph", s.graph_names[seg.graph]}, {"dwell", seg.dwell}});
  out["signal"] = {{"segments", std::move(segs)}, {"periodic", s.periodic}, {"alpha", s.alpha}, {"beta", s.beta}};

  if (s.initial_state) {
    json rows = json::array();
    for (Index i = 0; i < s.dims.n; ++i) {
      json row = json::array();
      for (Index c = 0; c < s.dims.d; ++c) row.push_back((*s.initial_state)(i * s.dims.d + c));
      rows.push_back(std::move(row));
    }
    out["initial_state"] = std::move(rows);
  }
  json run = {{"t_end", s.run.t_end},
              {"sample_dt", s.run.sample_dt},
              {"q_threshold", s.run.q_threshold},
              {"oracle_step", s.run.oracle_step}};
  if (s.run.horizon) run["horizon"] = *s.run.horizon;
  out["run"] = std::move(run);
  out["tolerances"] = to_json(s.tolerances);
  return out;
}

}  // namespace matcon
