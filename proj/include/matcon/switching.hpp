#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "matcon/graph.hpp"

namespace matcon {

/// One dwell interval: catalog graph index and its duration.
template <typename Scalar>
struct Segment {
  Index graph = 0;
  Scalar dwell = 0;
};

/// Piecewise-constant network: a catalog of graphs plus an ordered list of
/// dwell segments starting at t = 0, each dwell in [alpha, beta].
template <typename Scalar>
class SwitchingSignal {
 public:
  SwitchingSignal(std::vector<MatrixWeightedGraph<Scalar>> graphs,
                  std::vector<Segment<Scalar>> segments, Scalar alpha, Scalar beta)
      : graphs_(std::move(graphs)), segments_(std::move(segments)), alpha_(alpha), beta_(beta) {
    if (segments_.empty()) throw Error(ErrorCode::EmptySignal, "signal has no segments");
    if (graphs_.empty()) throw Error(ErrorCode::EmptySignal, "signal has no graphs");
    if (!(alpha_ > 0) || !(beta_ >= alpha_))
      throw Error(ErrorCode::DwellOutOfBounds, "dwell bounds require 0 < alpha <= beta");
    for (const auto& g : graphs_)
      if (!(g.dims() == graphs_.front().dims()))
        throw Error(ErrorCode::DimensionMismatch, "all graphs must share (n, d)");
    laplacians_.reserve(graphs_.size());
    for (const auto& g : graphs_) laplacians_.push_back(laplacian(g).matrix);

    instants_.reserve(segments_.size() + 1);
    instants_.push_back(Scalar(0));
    for (std::size_t k = 0; k < segments_.size(); ++k) {
      const auto& s = segments_[k];
      if (s.graph < 0 || s.graph >= static_cast<Index>(graphs_.size()))
        throw Error(ErrorCode::IndexOutOfRange, "segment references an unknown graph");
      if (!(s.dwell >= alpha_ && s.dwell <= beta_))
        throw Error(ErrorCode::DwellOutOfBounds,
                    "segment " + std::to_string(k) + " dwell " + std::to_string(s.dwell) +
                        " outside [alpha, beta] = [" + std::to_string(alpha_) + ", " +
                        std::to_string(beta_) + "]");
      instants_.push_back(instants_.back() + s.dwell);
    }
  }

  const GraphDimensions& dims() const { return graphs_.front().dims(); }
  const std::vector<MatrixWeightedGraph<Scalar>>& graphs() const { return graphs_; }
  const std::vector<Segment<Scalar>>& segments() const { return segments_; }
  /// Switch instants t_0 = 0, ..., t_m.
  const std::vector<Scalar>& instants() const { return instants_; }
  Index segment_count() const { return static_cast<Index>(segments_.size()); }
  Scalar alpha() const { return alpha_; }
  Scalar beta() const { return beta_; }
  Scalar total_duration() const { return instants_.back(); }

  const Matrix<Scalar>& graph_laplacian(Index graph) const { return laplacians_.at(graph); }
  const Matrix<Scalar>& segment_laplacian(Index k) const {
    return laplacians_.at(segments_.at(k).graph);
  }

  /// Index of the segment whose half-open interval contains t.
  Index segment_at(Scalar t) const {
    if (!(t >= 0) || t >= total_duration())
      throw Error(ErrorCode::TimeOutOfRange, "time outside the signal domain");
    auto it = std::upper_bound(instants_.begin(), instants_.end(), t);
    return static_cast<Index>(it - instants_.begin()) - 1;
  }

  /// First `count` segments repeated cyclically (count may exceed segment_count()).
  SwitchingSignal cyclic_prefix(Index count) const {
    std::vector<Segment<Scalar>> segs;
    segs.reserve(count);
    for (Index k = 0; k < count; ++k) segs.push_back(segments_[k % segment_count()]);
    return SwitchingSignal(graphs_, std::move(segs), alpha_, beta_);
  }

 private:
  std::vector<MatrixWeightedGraph<Scalar>> graphs_;
  std::vector<Segment<Scalar>> segments_;
  Scalar alpha_;
  Scalar beta_;
  std::vector<Scalar> instants_;
  std::vector<Matrix<Scalar>> laplacians_;
};

template <typename Scalar>
SwitchingSignal<Scalar> build_switching_signal(std::vector<MatrixWeightedGraph<Scalar>> graphs,
                                               std::vector<Segment<Scalar>> segments,
                                               Scalar alpha, Scalar beta) {
  return SwitchingSignal<Scalar>(std::move(graphs), std::move(segments), alpha, beta);
}

/// A switching signal repeated with period T; the base holds one period.
template <typename Scalar>
class PeriodicSignal {
 public:
  PeriodicSignal(SwitchingSignal<Scalar> base, Scalar period) : base_(std::move(base)), period_(period) {
    if (!(period_ > 0)) throw Error(ErrorCode::PeriodMismatch, "period must be positive");
    const Scalar sum = base_.total_duration();
    if (std::abs(sum - period_) > Scalar(1e-12) * std::max(Scalar(1), period_))
      throw Error(ErrorCode::PeriodMismatch, "segment dwells sum to " + std::to_string(sum) +
                                                 ", period is " + std::to_string(period_));
    if (base_.segment_count() <= 2)
      throw Error(ErrorCode::TooFewPartitions,
                  "a period needs m > 2 partitions, got " +
                      std::to_string(base_.segment_count()));
    for (const auto& s : base_.segments())
      if (!(s.dwell > base_.alpha()))
        throw Error(ErrorCode::DwellOutOfBounds,
                    "periodic dwells must exceed alpha strictly");
  }

  const SwitchingSignal<Scalar>& base() const { return base_; }
  Scalar period() const { return period_; }
  Index partitions() const { return base_.segment_count(); }
  const GraphDimensions& dims() const { return base_.dims(); }

  /// Segment index (into base) active at t >= 0.
  Index segment_at(Scalar t) const {
    if (!(t >= 0)) throw Error(ErrorCode::TimeOutOfRange, "time must be non-negative");
    Scalar phase = std::fmod(t, period_);
    // guard against fmod landing on the period itself through rounding
    if (phase >= base_.total_duration()) phase = 0;
    return base_.segment_at(phase);
  }

  /// The first `periods` periods as a finite switching signal.
  SwitchingSignal<Scalar> unroll(Index periods) const {
    return base_.cyclic_prefix(periods * partitions());
  }

  /// The first `count` segments of the infinite schedule.
  SwitchingSignal<Scalar> unroll_segments(Index count) const { return base_.cyclic_prefix(count); }

 private:
  SwitchingSignal<Scalar> base_;
  Scalar period_;
};

template <typename Scalar>
PeriodicSignal<Scalar> build_periodic_signal(SwitchingSignal<Scalar> base, Scalar period) {
  return PeriodicSignal<Scalar>(std::move(base), period);
}

/// Catalog index of the graph active at t.
template <typename Scalar>
Index graph_at(const SwitchingSignal<Scalar>& signal, Scalar t) {
  return signal.segments()[signal.segment_at(t)].graph;
}

template <typename Scalar>
Index graph_at(const PeriodicSignal<Scalar>& signal, Scalar t) {
  return signal.base().segments()[signal.segment_at(t)].graph;
}

/// Time-averaged network over [begin, end).
template <typename Scalar>
struct IntegralNetwork {
  Scalar begin = 0;
  Scalar end = 0;
  /// Averaged blocks; only pairs with a nonzero average appear as edges.
  MatrixWeightedGraph<Scalar> graph;
  Matrix<Scalar> avg_adjacency;
  BlockLaplacian<Scalar> avg_laplacian;
  /// Fraction of the span spent on each catalog graph.
  std::vector<Scalar> graph_weights;
};

namespace detail {

template <typename Scalar>
void accumulate_overlaps(const SwitchingSignal<Scalar>& s, Scalar offset, Scalar begin, Scalar end,
                         std::vector<Scalar>& time_on_graph) {
  const auto& t = s.instants();
  for (Index k = 0; k < s.segment_count(); ++k) {
    const Scalar lo = std::max(t[k] + offset, begin);
    const Scalar hi = std::min(t[k + 1] + offset, end);
    if (hi > lo) time_on_graph[s.segments()[k].graph] += hi - lo;
  }
}

template <typename Scalar>
IntegralNetwork<Scalar> assemble_integral(const SwitchingSignal<Scalar>& s, Scalar begin, Scalar end,
                                          const std::vector<Scalar>& time_on_graph,
                                          const Tolerances<Scalar>& tol) {
  const auto& dims = s.dims();
  const Scalar span = end - begin;
  IntegralNetwork<Scalar> net;
  net.begin = begin;
  net.end = end;
  net.graph = MatrixWeightedGraph<Scalar>(dims);
  net.avg_adjacency = Matrix<Scalar>::Zero(dims.size(), dims.size());
  net.avg_laplacian = {dims, Matrix<Scalar>::Zero(dims.size(), dims.size())};
  net.graph_weights.assign(s.graphs().size(), Scalar(0));

  std::map<EdgeKey, Matrix<Scalar>> pairs;
  for (std::size_t g = 0; g < s.graphs().size(); ++g) {
    if (time_on_graph[g] == 0) continue;
    const Scalar w = time_on_graph[g] / span;
    net.graph_weights[g] = w;
    net.avg_laplacian.matrix += w * s.graph_laplacian(static_cast<Index>(g));
    for (const auto& [ij, weight] : s.graphs()[g].edges()) {
      auto [it, fresh] = pairs.try_emplace(ij, Matrix<Scalar>::Zero(dims.d, dims.d));
      it->second += w * weight.entries;
    }
  }
  const Index d = dims.d;
  for (const auto& [ij, block] : pairs) {
    net.avg_adjacency.block(ij.first * d, ij.second * d, d, d) = block;
    net.avg_adjacency.block(ij.second * d, ij.first * d, d, d) = block;
    const Scalar cut = tol.definiteness * std::max(Scalar(1), max_abs(block));
    if (classify_definiteness(block, cut) == Definiteness::Zero) continue;
    net.graph.set_edge(ij.first, ij.second, block, tol);
  }
  return net;
}

}  // namespace detail

template <typename Scalar>
IntegralNetwork<Scalar> integral_network(const SwitchingSignal<Scalar>& s, Scalar begin, Scalar end,
                                         const Tolerances<Scalar>& tol = {}) {
  if (!(end > begin)) throw Error(ErrorCode::EmptySpan, "span must satisfy begin < end");
  if (begin < 0 || end > s.total_duration())
    throw Error(ErrorCode::TimeOutOfRange, "span exceeds the signal domain");
  std::vector<Scalar> time_on_graph(s.graphs().size(), Scalar(0));
  detail::accumulate_overlaps(s, Scalar(0), begin, end, time_on_graph);
  return detail::assemble_integral(s, begin, end, time_on_graph, tol);
}

template <typename Scalar>
IntegralNetwork<Scalar> integral_network(const PeriodicSignal<Scalar>& p, Scalar begin, Scalar end,
                                         const Tolerances<Scalar>& tol = {}) {
  if (!(end > begin)) throw Error(ErrorCode::EmptySpan, "span must satisfy begin < end");
  if (begin < 0) throw Error(ErrorCode::TimeOutOfRange, "span starts before t = 0");
  std::vector<Scalar> time_on_graph(p.base().graphs().size(), Scalar(0));
  const auto first = static_cast<long long>(std::floor(begin / p.period()));
  const auto last = static_cast<long long>(std::ceil(end / p.period()));
  for (long long l = first; l < last; ++l)
    detail::accumulate_overlaps(p.base(), Scalar(l) * p.period(), begin, end, time_on_graph);
  return detail::assemble_integral(p.base(), begin, end, time_on_graph, tol);
}

/// Laplacian of the integral network: the time average of L(t).
template <typename Scalar>
const BlockLaplacian<Scalar>& integral_laplacian(const IntegralNetwork<Scalar>& net) {
  return net.avg_laplacian;
}

}  // namespace matcon
