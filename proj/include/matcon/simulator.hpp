#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "matcon/analysis.hpp"

namespace matcon {

/// x_f = 1_n (x) mean_i x_i.
template <typename Scalar>
struct ConsensusPoint {
  Vector<Scalar> node_mean;  // length d
  Vector<Scalar> stacked;    // length d*n
};

template <typename Scalar>
Vector<Scalar> blockwise_mean(const Vector<Scalar>& x, const GraphDimensions& dims) {
  if (x.size() != dims.size()) throw Error(ErrorCode::DimensionMismatch, "state length must be d*n");
  return x.reshaped(dims.d, dims.n).rowwise().mean();
}

template <typename Scalar>
ConsensusPoint<Scalar> average_consensus_point(const Vector<Scalar>& x0, const GraphDimensions& dims) {
  ConsensusPoint<Scalar> out;
  out.node_mean = blockwise_mean(x0, dims);
  out.stacked = out.node_mean.replicate(dims.n, 1);
  return out;
}

/// Samples of x(t) with the disagreement V(t) = |x(t) - x_f|^2.
template <typename Scalar>
struct Trajectory {
  GraphDimensions dims;
  ConsensusPoint<Scalar> consensus;
  std::vector<Scalar> times;
  std::vector<Vector<Scalar>> states;
  std::vector<Scalar> disagreement;

  Index size() const { return static_cast<Index>(times.size()); }

  void push(Scalar t, Vector<Scalar> x) {
    disagreement.push_back((x - consensus.stacked).squaredNorm());
    times.push_back(t);
    states.push_back(std::move(x));
  }
};

/// x' = e^{-L dt} x.
template <typename Scalar>
Vector<Scalar> propagate_segment(const Vector<Scalar>& x, const BlockLaplacian<Scalar>& lap, Scalar dt,
                                 const Tolerances<Scalar>& tol = {}) {
  if (x.size() != lap.dims.size()) throw Error(ErrorCode::DimensionMismatch, "state length must be d*n");
  if (dt < 0) throw Error(ErrorCode::NegativeDuration, "duration must be non-negative");
  if (dt == 0) return x;
  return matrix_exponential_symmetric(lap.matrix, dt, tol) * x;
}

namespace detail {

template <typename Scalar>
bool near(Scalar a, Scalar b) {
  return std::abs(a - b) <= Scalar(1e-12) * std::max(Scalar(1), std::abs(b));
}

/// Switch instants inside [begin, end] plus multiples of sample_dt; switch
/// instants win when a grid point nearly coincides with one.
template <typename Scalar>
std::vector<Scalar> sample_times(const SwitchingSignal<Scalar>& s, Scalar begin, Scalar end,
                                 Scalar sample_dt) {
  std::vector<Scalar> fixed{begin, end};
  for (Scalar t : s.instants())
    if (t > begin && t < end) fixed.push_back(t);
  std::sort(fixed.begin(), fixed.end());
  std::vector<Scalar> out = fixed;
  if (sample_dt > 0) {
    const auto j0 = static_cast<long long>(std::ceil(begin / sample_dt));
    for (long long j = j0;; ++j) {
      const Scalar t = Scalar(j) * sample_dt;
      if (t > end) break;
      if (t < begin) continue;
      auto it = std::lower_bound(fixed.begin(), fixed.end(), t);
      const bool clash = (it != fixed.end() && near(*it, t)) || (it != fixed.begin() && near(*(it - 1), t));
      if (!clash) out.push_back(t);
    }
    std::sort(out.begin(), out.end());
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

template <typename Scalar>
void check_run(const SwitchingSignal<Scalar>& s, const Vector<Scalar>& x, Scalar begin, Scalar end) {
  if (x.size() != s.dims().size()) throw Error(ErrorCode::DimensionMismatch, "state length must be d*n");
  if (!(begin >= 0) || !(end > begin))
    throw Error(ErrorCode::TimeOutOfRange, "simulation needs 0 <= t_begin < t_end");
  if (end > s.total_duration() * (1 + Scalar(1e-14)))
    throw Error(ErrorCode::TimeOutOfRange, "t_end exceeds the signal duration");
}

template <typename Scalar>
SwitchingSignal<Scalar> covering(const PeriodicSignal<Scalar>& p, Scalar end) {
  const auto periods = static_cast<Index>(std::ceil(end / p.period())) + 1;
  return p.unroll(periods);
}

}  // namespace detail

/// Exact propagation of dx/dt = -L(t) x from (t_begin, x_begin) to t_end.
/// The consensus point is taken from x_begin.
template <typename Scalar>
Trajectory<Scalar> simulate_from(const SwitchingSignal<Scalar>& s, const Vector<Scalar>& x_begin,
                                 Scalar t_begin, Scalar t_end, Scalar sample_dt,
                                 const Tolerances<Scalar>& tol = {}) {
  detail::check_run(s, x_begin, t_begin, t_end);
  if (!(sample_dt > 0)) throw Error(ErrorCode::NegativeDuration, "sample_dt must be positive");
  const auto samples = detail::sample_times(s, t_begin, t_end, sample_dt);
  const auto& inst = s.instants();
  SegmentExponentials<Scalar> exps(s, tol);

  Trajectory<Scalar> traj;
  traj.dims = s.dims();
  traj.consensus = average_consensus_point(x_begin, s.dims());

  Vector<Scalar> anchor = x_begin;
  Scalar anchor_t = t_begin;
  std::size_t next = 0;
  traj.push(samples[next++], anchor);
  for (Index k = s.segment_at(t_begin); k < s.segment_count() && anchor_t < t_end; ++k) {
    const Index g = s.segments()[k].graph;
    const Scalar seg_end = std::min(inst[k + 1], t_end);
    while (next < samples.size() && samples[next] < seg_end && !detail::near(samples[next], seg_end))
      traj.push(samples[next], exps.apply(g, samples[next] - anchor_t, anchor)), ++next;
    if (anchor_t == inst[k] && seg_end == inst[k + 1])
      anchor = exps.full(g, s.segments()[k].dwell) * anchor;
    else
      anchor = exps.apply(g, seg_end - anchor_t, anchor);
    anchor_t = seg_end;
    if (next < samples.size()) traj.push(samples[next++], anchor);
  }
  return traj;
}

template <typename Scalar>
Trajectory<Scalar> simulate(const SwitchingSignal<Scalar>& s, const Vector<Scalar>& x0, Scalar t_end,
                            Scalar sample_dt, const Tolerances<Scalar>& tol = {}) {
  return simulate_from(s, x0, Scalar(0), t_end, sample_dt, tol);
}

template <typename Scalar>
Trajectory<Scalar> simulate(const PeriodicSignal<Scalar>& p, const Vector<Scalar>& x0, Scalar t_end,
                            Scalar sample_dt, const Tolerances<Scalar>& tol = {}) {
  if (!(t_end > 0)) throw Error(ErrorCode::TimeOutOfRange, "t_end must be positive");
  return simulate(detail::covering(p, t_end), x0, t_end, sample_dt, tol);
}

template <typename Scalar>
Trajectory<Scalar> simulate_from(const PeriodicSignal<Scalar>& p, const Vector<Scalar>& x_begin,
                                 Scalar t_begin, Scalar t_end, Scalar sample_dt,
                                 const Tolerances<Scalar>& tol = {}) {
  return simulate_from(detail::covering(p, t_end), x_begin, t_begin, t_end, sample_dt, tol);
}

/// Classical fixed-step RK4 on dx/dt = -L(t) x. Each interval between
/// consecutive sample times (switch instants always included) is split into
/// ceil(length / step) equal steps, so no step crosses a switch.
/// sample_dt <= 0 samples only at switch instants and t_end.
template <typename Scalar>
Trajectory<Scalar> rk4_reference(const SwitchingSignal<Scalar>& s, const Vector<Scalar>& x0, Scalar t_end,
                                 Scalar step, Scalar sample_dt = 0) {
  detail::check_run(s, x0, Scalar(0), t_end);
  if (!(step > 0)) throw Error(ErrorCode::NegativeDuration, "step must be positive");
  const auto samples = detail::sample_times(s, Scalar(0), t_end, sample_dt);

  Trajectory<Scalar> traj;
  traj.dims = s.dims();
  traj.consensus = average_consensus_point(x0, s.dims());
  Vector<Scalar> x = x0;
  traj.push(samples.front(), x);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const Scalar a = samples[i - 1];
    const Scalar b = samples[i];
    const Matrix<Scalar>& lap = s.segment_laplacian(s.segment_at((a + b) / 2));
    const auto steps = std::max<long long>(1, static_cast<long long>(std::ceil((b - a) / step - Scalar(1e-9))));
    const Scalar h = (b - a) / Scalar(steps);
    for (long long j = 0; j < steps; ++j) {
      const Vector<Scalar> k1 = -(lap * x);
      const Vector<Scalar> k2 = -(lap * (x + (h / 2) * k1));
      const Vector<Scalar> k3 = -(lap * (x + (h / 2) * k2));
      const Vector<Scalar> k4 = -(lap * (x + h * k3));
      x += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    traj.push(b, x);
  }
  return traj;
}

template <typename Scalar>
Trajectory<Scalar> rk4_reference(const PeriodicSignal<Scalar>& p, const Vector<Scalar>& x0, Scalar t_end,
                                 Scalar step, Scalar sample_dt = 0) {
  if (!(t_end > 0)) throw Error(ErrorCode::TimeOutOfRange, "t_end must be positive");
  return rk4_reference(detail::covering(p, t_end), x0, t_end, step, sample_dt);
}

template <typename Scalar>
std::vector<std::pair<Scalar, Scalar>> disagreement_trace(const Trajectory<Scalar>& traj) {
  std::vector<std::pair<Scalar, Scalar>> out;
  out.reserve(traj.times.size());
  for (std::size_t i = 0; i < traj.times.size(); ++i) out.emplace_back(traj.times[i], traj.disagreement[i]);
  return out;
}

/// Largest relative drift of the blockwise mean from its initial value.
template <typename Scalar>
Scalar mean_drift(const Trajectory<Scalar>& traj) {
  const Scalar scale = std::max(Scalar(1), traj.consensus.node_mean.cwiseAbs().maxCoeff());
  Scalar worst = 0;
  for (const auto& x : traj.states)
    worst = std::max(worst, (blockwise_mean(x, traj.dims) - traj.consensus.node_mean).cwiseAbs().maxCoeff());
  return worst / scale;
}

/// Largest increase V(t_{s+1}) - V(t_s), as a fraction of V(0) (absolute when V(0) = 0).
template <typename Scalar>
Scalar monotonicity_violation(const Trajectory<Scalar>& traj) {
  if (traj.disagreement.empty()) return 0;
  const Scalar v0 = traj.disagreement.front();
  Scalar worst = 0;
  for (std::size_t i = 1; i < traj.disagreement.size(); ++i)
    worst = std::max(worst, traj.disagreement[i] - traj.disagreement[i - 1]);
  return v0 > 0 ? worst / v0 : worst;
}

/// Max infinity-norm difference between two trajectories sampled at the same times.
template <typename Scalar>
Scalar max_deviation(const Trajectory<Scalar>& a, const Trajectory<Scalar>& b) {
  if (a.times.size() != b.times.size())
    throw Error(ErrorCode::DimensionMismatch, "trajectories have different sample counts");
  Scalar worst = 0;
  for (std::size_t i = 0; i < a.states.size(); ++i)
    worst = std::max(worst, (a.states[i] - b.states[i]).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace matcon
