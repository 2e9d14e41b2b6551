#include <cmath>
#include <random>

#include "doctest.h"
#include "matcon/simulator.hpp"
#include "support/oracles.hpp"
#include "support/random.hpp"
#include "support/example_network.hpp"

using namespace matcon;
using fixture::Mat;
using fixture::Vec;
using fixture::mat2;

namespace {

MatrixWeightedGraph<double> identity_path(const GraphDimensions& dims) {
  MatrixWeightedGraph<double> g(dims);
  for (Index k = 1; k < dims.n; ++k) g.set_edge(k - 1, k, Mat(Mat::Identity(dims.d, dims.d)));
  return g;
}

/// The example schedule written with unit dwells, as in t_k = k * dt.
SwitchingSignal<double> unit_dwell_signal(int periods) {
  std::vector<Segment<double>> segs;
  for (int l = 0; l < periods; ++l)
    for (Index g : {0, 0, 1, 1, 1, 2}) segs.push_back({g, 1.0});
  return build_switching_signal<double>({fixture::g1(), fixture::g2(), fixture::g3()}, segs, 0.5, 4.0);
}

SwitchingSignal<double> g1_only(int segments) {
  return build_switching_signal<double>({fixture::g1()}, std::vector<Segment<double>>(segments, {0, 1.0}), 0.5, 4.0);
}

}  // namespace

TEST_CASE("transition_matrix") {
  const auto s = fixture::base_signal();
  SUBCASE("one factor") {
    const auto phi = transition_matrix(s, 1, 2);
    CHECK((phi.matrix - oracle::expm_taylor(-3.0 * fixture::printed_l2())).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("one period fixes R, is non-expansive and matches RK4 propagation") {
    const auto phi = transition_matrix(s, 0, 3);
    const Mat r = consensus_basis<double>(fixture::kDims);
    CHECK((phi.matrix * r - r).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::JacobiSVD<Mat> svd(phi.matrix);
    CHECK(svd.singularValues()(0) <= 1 + 1e-10);

    const Mat taylor = oracle::expm_taylor(-fixture::printed_l3()) * oracle::expm_taylor(-3.0 * fixture::printed_l2()) *
                       oracle::expm_taylor(-2.0 * fixture::printed_l1());
    CHECK((phi.matrix - taylor).cwiseAbs().maxCoeff() < 1e-10);
    for (Index c = 0; c < 8; ++c) {
      const auto rk = rk4_reference(s, Vec(Vec::Unit(8, c)), 6.0, 1e-3);
      CHECK((rk.states.back() - phi.matrix.col(c)).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
  SUBCASE("empty graphs give the identity") {
    auto empty = build_switching_signal<double>({MatrixWeightedGraph<double>(fixture::kDims)}, {{0, 1.0}, {0, 2.0}}, 0.5, 4.0);
    CHECK(transition_matrix(empty, 0, 2).matrix == Mat::Identity(8, 8));
  }
  SUBCASE("index errors") {
    CHECK_THROWS_AS(transition_matrix(s, 2, 2), Error);
    CHECK_THROWS_AS(transition_matrix(s, 0, 4), Error);
    try {
      transition_matrix(s, 2, 1);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::IndexOrder);
    }
  }
}

TEST_CASE("contraction_factor") {
  SUBCASE("identity does not contract") {
    const auto rep = contraction_factor<double>(Mat::Identity(8, 8), 2);
    CHECK(rep.mu_next == 1.0);
    CHECK_FALSE(rep.contracts);
  }
  SUBCASE("time-invariant PD tree follows the spectral mapping") {
    const GraphDimensions dims(3, 2);
    const Mat l = laplacian(identity_path(dims)).matrix;
    const auto lam = symmetric_eigen<double>(l).eigenvalues;
    const auto rep = contraction_factor<double>(matrix_exponential_symmetric<double>(l, 1.0), 2);
    CHECK(rep.mu_next == doctest::Approx(std::exp(-2 * lam(2))).epsilon(1e-12));
    CHECK(rep.contracts);
    CHECK(rep.mu(0) == doctest::Approx(1.0));
    CHECK(rep.mu(1) == doctest::Approx(1.0));
  }
  SUBCASE("example period contracts") {
    // Taylor-exponential + Jacobi oracle: mu_3 = 0.39765991062806888
    const auto rep = contraction_factor(transition_matrix(fixture::base_signal(), 0, 3), 2);
    CHECK(rep.contracts);
    CHECK(std::abs(rep.mu_next - 0.39765991062806888) < 1e-10);
    CHECK(std::abs(rep.mu(0) - 1) < 1e-10);
    CHECK(std::abs(rep.mu(1) - 1) < 1e-10);
    for (Index j = 0; j < rep.mu.size(); ++j) CHECK(rep.mu(j) >= -1e-12);
  }
}

TEST_CASE("positive_spanning_tree") {
  const auto net = integral_network(fixture::base_signal(), 0.0, 6.0);
  const auto tree = positive_spanning_tree(net);
  CHECK(tree.exists);
  CHECK(tree.edges == std::vector<EdgeKey>{{0, 1}, {1, 2}, {1, 3}});

  CHECK_FALSE(positive_spanning_tree(fixture::g1()).exists);
  CHECK_FALSE(positive_spanning_tree(fixture::g2()).exists);
  CHECK_FALSE(positive_spanning_tree(fixture::g3()).exists);

  MatrixWeightedGraph<double> complete(GraphDimensions(5, 3));
  for (Index i = 0; i < 5; ++i)
    for (Index j = i + 1; j < 5; ++j) complete.set_edge(i, j, Mat(Mat::Identity(3, 3)));
  const auto full = positive_spanning_tree(complete);
  CHECK(full.exists);
  CHECK(full.edges == std::vector<EdgeKey>{{0, 1}, {0, 2}, {0, 3}, {0, 4}});
}

TEST_CASE("periodic_consensus_verdict") {
  SUBCASE("example network reaches consensus") {
    const auto v = periodic_consensus_verdict(fixture::periodic_signal());
    CHECK(v.decision == Decision::Consensus);
    REQUIRE(v.find<NullSpaceEqualsR>());
    CHECK(v.find<NullSpaceEqualsR>()->null_dimension == 2);
    REQUIRE(v.find<PositiveSpanningTree>());
    CHECK(v.find<PositiveSpanningTree>()->edges == std::vector<EdgeKey>{{0, 1}, {1, 2}, {1, 3}});
    CHECK_FALSE(v.horizon.has_value());
  }
  SUBCASE("G1 alone never reaches consensus") {
    const auto v = periodic_consensus_verdict(build_periodic_signal(g1_only(3), 3.0));
    CHECK(v.decision == Decision::NoConsensus);
    const auto* obs = v.find<NullSpaceObstruction<double>>();
    REQUIRE(obs);
    CHECK((fixture::printed_l1() * obs->witness).norm() < 1e-12);
    CHECK((consensus_basis<double>(fixture::kDims).transpose() * obs->witness).norm() < obs->witness.norm() - 1e-6);
    CHECK(obs->null_dimension == 5);
  }
  SUBCASE("a PD spanning tree repeated is enough") {
    const GraphDimensions dims(4, 2);
    auto s = build_switching_signal<double>({identity_path(dims)}, {{0, 1.0}, {0, 1.0}, {0, 1.0}}, 0.5, 4.0);
    CHECK(periodic_consensus_verdict(build_periodic_signal(s, 3.0)).decision == Decision::Consensus);
  }
}

TEST_CASE("necessary_condition_scan") {
  SUBCASE("one period closes one window") {
    const auto v = necessary_condition_scan(unit_dwell_signal(1), 6);
    CHECK(v.decision == Decision::Inconclusive);
    REQUIRE(v.windows.size() == 1);
    CHECK(v.windows[0].closed);
    CHECK(v.windows[0].begin == 0);
    CHECK(v.windows[0].end == 6);
    CHECK(v.horizon == 6);
    CHECK(v.find<HorizonExhausted<double>>());

    const auto collapsed = necessary_condition_scan(fixture::base_signal(), 3);
    REQUIRE(collapsed.windows.size() == 1);
    CHECK(collapsed.windows[0].end == 6);
  }
  SUBCASE("an unfinished remainder is not an obstruction") {
    const auto s = build_switching_signal<double>({fixture::g1(), fixture::g2()}, {{0, 1.0}, {1, 1.0}, {0, 1.0}},
                                                  0.5, 4.0);
    const auto v = necessary_condition_scan(s, 3);
    CHECK(v.decision == Decision::Inconclusive);
    REQUIRE(v.windows.size() == 1);
    CHECK(v.windows[0].closed);
    CHECK(v.windows[0].end == 3);
  }
  SUBCASE("G1 alone never closes a window") {
    const auto v = necessary_condition_scan(g1_only(4), 4);
    CHECK(v.decision == Decision::NoConsensus);
    REQUIRE(v.windows.size() == 1);
    CHECK_FALSE(v.windows[0].closed);
    const auto* obs = v.find<NullSpaceObstruction<double>>();
    REQUIRE(obs);
    CHECK((fixture::printed_l1() * obs->witness).norm() < 1e-12);
  }
  SUBCASE("time-invariant PD tree closes at once") {
    auto s = build_switching_signal<double>({identity_path(GraphDimensions(3, 2))}, {{0, 1.0}}, 0.5, 4.0);
    const auto v = necessary_condition_scan(s, 1);
    REQUIRE(v.windows.size() == 1);
    CHECK(v.windows[0].closed);
    CHECK(v.windows[0].last == 1);
  }
  SUBCASE("horizon bounds") {
    CHECK_THROWS_AS(necessary_condition_scan(fixture::base_signal(), 4), Error);
    CHECK_THROWS_AS(necessary_condition_scan(fixture::base_signal(), 0), Error);
  }
}

TEST_CASE("sufficient_condition_certificate") {
  SUBCASE("three unrolled periods") {
    const auto v = sufficient_condition_certificate(fixture::periodic_signal().unroll(3), 9, 0.99);
    CHECK(v.decision == Decision::Consensus);
    // G1+G2 already closes, so windows are [0,5), [5,11) and [11,18) with the
    // trailing G3 absorbed; they do not line up with the period.
    REQUIRE(v.windows.size() == 3);
    const double ends[] = {5, 11, 18};
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& w = v.windows[i];
      CHECK(w.closed);
      CHECK(w.end == ends[i]);
      REQUIRE(w.mu_next.has_value());
      CHECK(*w.mu_next < 0.99);
    }
    REQUIRE(v.find<UniformContraction<double>>());
  }
  SUBCASE("G1 alone is inconclusive") {
    const auto v = sufficient_condition_certificate(g1_only(5), 5, 0.99);
    CHECK(v.decision == Decision::Inconclusive);
    const auto* h = v.find<HorizonExhausted<double>>();
    REQUIRE(h);
    CHECK(*h->worst_mu >= 1 - 1e-9);
  }
  SUBCASE("boundary q is accepted") {
    const GraphDimensions dims(3, 2);
    auto s = build_switching_signal<double>({identity_path(dims)}, {{0, 1.0}}, 0.5, 4.0);
    const auto lam = symmetric_eigen<double>(laplacian(identity_path(dims)).matrix).eigenvalues;
    const double q = std::exp(-2 * lam(2) * 1.0);
    CHECK(sufficient_condition_certificate(s, 1, q).decision == Decision::Consensus);
    CHECK(sufficient_condition_certificate(s, 1, q * 0.5).decision == Decision::Inconclusive);
  }
  SUBCASE("threshold must be in (0, 1)") {
    for (double q : {0.0, 1.0, -0.5, 2.0}) {
      try {
        sufficient_condition_certificate(fixture::base_signal(), 3, q);
        FAIL("expected BadThreshold");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadThreshold);
      }
    }
  }
}

TEST_CASE("window contraction agrees with the integral null space (random signals)") {
  std::mt19937_64 rng(fixture::seed(101));
  int agree = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const auto s = fixture::random_signal(rng);
    const auto phi = transition_matrix(s, 0, s.segment_count());
    const bool contracts = contraction_factor(phi, s.dims().d).contracts;
    const auto net = integral_network(s, 0.0, s.total_duration());
    const bool null_r = null_space_basis<double>(integral_laplacian(net).matrix, s.dims()).equals_consensus;
    CHECK(contracts == null_r);
    agree += contracts == null_r;

    // tree in the integral graph implies null space R, never the converse
    if (positive_spanning_tree(net).exists) CHECK(null_r);

    // appending segments never expands
    double prev = 1.0;
    for (Index k = 1; k <= s.segment_count(); ++k) {
      Eigen::JacobiSVD<Mat> svd(transition_matrix(s, 0, k).matrix);
      const double top = svd.singularValues()(0);
      CHECK(top <= 1 + 1e-10);
      CHECK(top <= prev + 1e-10);
      prev = top;
    }
  }
  CHECK(agree == 150);
}

TEST_CASE("obstruction witnesses are fixed points of the dynamics") {
  const auto v = necessary_condition_scan(g1_only(4), 4);
  const auto* obs = v.find<NullSpaceObstruction<double>>();
  REQUIRE(obs);
  const auto traj = simulate(g1_only(4), obs->witness, 4.0, 0.25);
  for (const auto& x : traj.states) CHECK((x - obs->witness).cwiseAbs().maxCoeff() < 1e-12);
}
