#pragma once

#include <limits>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "matcon/switching.hpp"
#include "matcon/union_find.hpp"

namespace matcon {

/// Phi(first, last) = e^{-L^{last-1} dt_{last-1}} ... e^{-L^{first} dt_{first}}.
template <typename Scalar>
struct TransitionMatrix {
  Index first = 0;
  Index last = 0;
  Matrix<Scalar> matrix;
};

template <typename Scalar>
struct ContractionReport {
  Vector<Scalar> mu;  // eigenvalues of Phi^T Phi, descending
  Scalar mu_next = 0; // mu_{d+1}
  bool contracts = false;
};

/// Lazily computed per-graph spectra and per-(graph, dwell) exponentials.
template <typename Scalar>
class SegmentExponentials {
 public:
  explicit SegmentExponentials(const SwitchingSignal<Scalar>& signal,
                               const Tolerances<Scalar>& tol = {})
      : signal_(signal), tol_(tol), spectra_(signal.graphs().size()) {}

  const SpectrumReport<Scalar>& spectrum(Index graph) {
    auto& slot = spectra_.at(graph);
    if (!slot) slot = symmetric_eigen(signal_.graph_laplacian(graph), tol_);
    return *slot;
  }

  const Matrix<Scalar>& full(Index graph, Scalar dwell) {
    auto key = std::make_pair(graph, dwell);
    auto it = full_.find(key);
    if (it == full_.end()) it = full_.emplace(key, exponential_from_spectrum(spectrum(graph), dwell)).first;
    return it->second;
  }

  const Matrix<Scalar>& segment(Index k) {
    const auto& s = signal_.segments().at(k);
    return full(s.graph, s.dwell);
  }

  /// e^{-L_graph t} x without forming the matrix.
  Vector<Scalar> apply(Index graph, Scalar t, const Vector<Scalar>& x) {
    const auto& sp = spectrum(graph);
    const Vector<Scalar> decay = (-t * sp.eigenvalues.array()).exp().matrix();
    return sp.eigenvectors * (decay.asDiagonal() * (sp.eigenvectors.transpose() * x));
  }

 private:
  const SwitchingSignal<Scalar>& signal_;
  Tolerances<Scalar> tol_;
  std::vector<std::optional<SpectrumReport<Scalar>>> spectra_;
  std::map<std::pair<Index, Scalar>, Matrix<Scalar>> full_;
};

template <typename Scalar>
TransitionMatrix<Scalar> transition_matrix(const SwitchingSignal<Scalar>& signal, Index first,
                                           Index last, const Tolerances<Scalar>& tol = {}) {
  if (!(first < last)) throw Error(ErrorCode::IndexOrder, "transition needs first < last");
  if (first < 0 || last > signal.segment_count())
    throw Error(ErrorCode::IndexOutOfRange, "segment index outside the signal");
  SegmentExponentials<Scalar> exps(signal, tol);
  Matrix<Scalar> phi = Matrix<Scalar>::Identity(signal.dims().size(), signal.dims().size());
  for (Index k = first; k < last; ++k) phi = exps.segment(k) * phi;
  return {first, last, std::move(phi)};
}

template <typename Scalar>
ContractionReport<Scalar> contraction_factor(const Matrix<Scalar>& phi, Index d,
                                             const Tolerances<Scalar>& tol = {}) {
  if (phi.rows() != phi.cols() || d < 1 || d >= phi.rows())
    throw Error(ErrorCode::DimensionMismatch, "transition matrix must be square with d*n > d");
  Matrix<Scalar> gram = phi.transpose() * phi;
  gram = (gram + gram.transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(gram, Eigen::EigenvaluesOnly);
  ContractionReport<Scalar> out;
  out.mu = solver.eigenvalues().reverse();
  out.mu_next = out.mu(d);
  out.contracts = out.mu_next < Scalar(1) - tol.mu;
  return out;
}

template <typename Scalar>
ContractionReport<Scalar> contraction_factor(const TransitionMatrix<Scalar>& phi, Index d,
                                             const Tolerances<Scalar>& tol = {}) {
  return contraction_factor(phi.matrix, d, tol);
}

struct SpanningTree {
  bool exists = false;
  std::vector<EdgeKey> edges;  // 0-based, ascending
};

/// Spanning tree over the positive-definite edges, chosen greedily in
/// lexicographic edge order.
template <typename Scalar>
SpanningTree positive_spanning_tree(const MatrixWeightedGraph<Scalar>& g) {
  SpanningTree out;
  UnionFind uf(g.dims().n);
  for (const auto& [ij, w] : g.edges()) {
    if (!w.positive_definite()) continue;
    if (uf.unite(ij.first, ij.second)) out.edges.push_back(ij);
  }
  out.exists = uf.components() == 1;
  return out;
}

template <typename Scalar>
SpanningTree positive_spanning_tree(const IntegralNetwork<Scalar>& net) {
  return positive_spanning_tree(net.graph);
}

// ---------------------------------------------------------------------------
// Verdicts

enum class Decision { Consensus, NoConsensus, Inconclusive };

constexpr std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::Consensus: return "Consensus";
    case Decision::NoConsensus: return "NoConsensus";
    case Decision::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

/// Segments [first, last) covering [begin, end).
template <typename Scalar>
struct Window {
  Index first = 0;
  Index last = 0;
  Scalar begin = 0;
  Scalar end = 0;
  bool closed = false;  // integral Laplacian has null space R
  std::optional<Scalar> mu_next;
};

struct NullSpaceEqualsR {
  Index null_dimension = 0;
};

struct PositiveSpanningTree {
  std::vector<EdgeKey> edges;
};

template <typename Scalar>
struct UniformContraction {
  Scalar q = 0;
  Scalar worst_mu = 0;
};

template <typename Scalar>
struct NullSpaceObstruction {
  Vector<Scalar> witness;
  Index first = 0;
  Index last = 0;
  Scalar begin = 0;
  Scalar end = 0;
  Index null_dimension = 0;
};

template <typename Scalar>
struct HorizonExhausted {
  Index horizon = 0;
  std::optional<Scalar> worst_mu;
};

template <typename Scalar>
using Certificate = std::variant<NullSpaceEqualsR, PositiveSpanningTree, UniformContraction<Scalar>,
                                 NullSpaceObstruction<Scalar>, HorizonExhausted<Scalar>>;

template <typename Scalar>
struct Verdict {
  Decision decision = Decision::Inconclusive;
  std::vector<Certificate<Scalar>> certificates;
  /// Segment count scanned; empty for the periodic (infinite-horizon) verdict.
  std::optional<Index> horizon;
  std::vector<Window<Scalar>> windows;

  template <typename T>
  const T* find() const {
    for (const auto& c : certificates)
      if (const T* p = std::get_if<T>(&c)) return p;
    return nullptr;
  }
};

template <typename Scalar>
Verdict<Scalar> periodic_consensus_verdict(const PeriodicSignal<Scalar>& p,
                                           const Tolerances<Scalar>& tol = {}) {
  const auto net = integral_network(p, Scalar(0), p.period(), tol);
  const auto ns = null_space_basis(net.avg_laplacian.matrix, p.dims(), tol);
  Verdict<Scalar> v;
  if (ns.equals_consensus) {
    v.decision = Decision::Consensus;
    v.certificates.push_back(NullSpaceEqualsR{ns.dimension});
    if (auto tree = positive_spanning_tree(net); tree.exists)
      v.certificates.push_back(PositiveSpanningTree{std::move(tree.edges)});
  } else {
    auto eta = obstruction_witness(ns, p.dims());
    if (!eta) throw Error(ErrorCode::InvalidSignal, "null space differs from R but no witness found");
    v.decision = Decision::NoConsensus;
    v.certificates.push_back(NullSpaceObstruction<Scalar>{
        std::move(*eta), 0, p.partitions(), Scalar(0), p.period(), ns.dimension});
  }
  return v;
}

namespace detail {

template <typename Scalar>
struct WindowScan {
  std::vector<Window<Scalar>> windows;  // open only when nothing closed
  std::optional<NullSpaceObstruction<Scalar>> obstruction;
};

/// Greedy minimal windows: close as soon as the window's integral Laplacian
/// has null space R. A trailing remainder joins the last closed window.
template <typename Scalar>
WindowScan<Scalar> scan_windows(const SwitchingSignal<Scalar>& s, Index horizon,
                                const Tolerances<Scalar>& tol) {
  if (horizon < 1 || horizon > s.segment_count())
    throw Error(ErrorCode::IndexOutOfRange, "horizon must lie in [1, segment count]");
  const auto& dims = s.dims();
  const auto& t = s.instants();
  WindowScan<Scalar> out;
  Index start = 0;
  Matrix<Scalar> weighted = Matrix<Scalar>::Zero(dims.size(), dims.size());
  std::optional<NullSpaceReport<Scalar>> last_report;
  for (Index k = 0; k < horizon; ++k) {
    weighted += s.segments()[k].dwell * s.segment_laplacian(k);
    const Matrix<Scalar> averaged = weighted / (t[k + 1] - t[start]);
    auto ns = null_space_basis(averaged, dims, tol);
    if (ns.equals_consensus) {
      out.windows.push_back({start, k + 1, t[start], t[k + 1], true, std::nullopt});
      start = k + 1;
      weighted.setZero();
      last_report.reset();
    } else {
      last_report = std::move(ns);
    }
  }
  if (start < horizon && !out.windows.empty()) {
    // A remainder that never closes is absorbed by the previous window:
    // adding PSD terms cannot enlarge the null space, so the merge stays closed.
    out.windows.back().last = horizon;
    out.windows.back().end = t[horizon];
  } else if (start < horizon) {
    out.windows.push_back({start, horizon, t[start], t[horizon], false, std::nullopt});
    auto eta = obstruction_witness(*last_report, dims);
    if (eta)
      out.obstruction = NullSpaceObstruction<Scalar>{std::move(*eta), start, horizon, t[start],
                                                     t[horizon], last_report->dimension};
  }
  return out;
}

}  // namespace detail

/// Finite-horizon check of the necessary window condition. Refutes consensus
/// over the horizon only when no window closes in it; never certifies it.
template <typename Scalar>
Verdict<Scalar> necessary_condition_scan(const SwitchingSignal<Scalar>& s, Index horizon,
                                         const Tolerances<Scalar>& tol = {}) {
  auto scan = detail::scan_windows(s, horizon, tol);
  Verdict<Scalar> v;
  v.horizon = horizon;
  v.windows = std::move(scan.windows);
  if (scan.obstruction) {
    v.decision = Decision::NoConsensus;
    v.certificates.push_back(std::move(*scan.obstruction));
  } else {
    v.decision = Decision::Inconclusive;
    v.certificates.push_back(HorizonExhausted<Scalar>{horizon, std::nullopt});
  }
  return v;
}

/// Certifies consensus when greedy windows tile the horizon and every window
/// contracts by at least q.
template <typename Scalar>
Verdict<Scalar> sufficient_condition_certificate(const SwitchingSignal<Scalar>& s, Index horizon,
                                                 Scalar q, const Tolerances<Scalar>& tol = {}) {
  if (!(q > 0 && q < 1)) throw Error(ErrorCode::BadThreshold, "q must lie in (0, 1)");
  auto scan = detail::scan_windows(s, horizon, tol);
  SegmentExponentials<Scalar> exps(s, tol);
  const Index dn = s.dims().size();
  Scalar worst = 0;
  bool tiled = true;
  for (auto& w : scan.windows) {
    Matrix<Scalar> phi = Matrix<Scalar>::Identity(dn, dn);
    for (Index k = w.first; k < w.last; ++k) phi = exps.segment(k) * phi;
    w.mu_next = contraction_factor(phi, s.dims().d, tol).mu_next;
    worst = std::max(worst, *w.mu_next);
    tiled = tiled && w.closed;
  }
  Verdict<Scalar> v;
  v.horizon = horizon;
  v.windows = std::move(scan.windows);
  if (tiled && worst <= q + tol.mu && worst < Scalar(1) - tol.mu) {
    v.decision = Decision::Consensus;
    v.certificates.push_back(UniformContraction<Scalar>{q, worst});
  } else {
    v.decision = Decision::Inconclusive;
    v.certificates.push_back(HorizonExhausted<Scalar>{horizon, worst});
  }
  return v;
}

}  // namespace matcon
