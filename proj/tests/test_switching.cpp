#include <random>

#include "doctest.h"
#include "matcon/switching.hpp"
#include "support/oracles.hpp"
#include "support/random.hpp"
#include "support/example_network.hpp"

using namespace matcon;
using fixture::Mat;
using fixture::mat2;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::ParseError;
}

}  // namespace

TEST_CASE("build_switching_signal") {
  const auto s = fixture::base_signal();
  CHECK(s.instants() == std::vector<double>{0, 2, 5, 6});
  CHECK(s.total_duration() == 6);

  CHECK_NOTHROW(build_switching_signal<double>({fixture::g1()}, {{0, 1.0}}, 0.5, 4.0));
  CHECK(code_of([] { build_switching_signal<double>({fixture::g1()}, {{0, 5.0}}, 0.5, 4.0); }) ==
        ErrorCode::DwellOutOfBounds);
  CHECK(code_of([] { build_switching_signal<double>({fixture::g1()}, {}, 0.5, 4.0); }) ==
        ErrorCode::EmptySignal);
  CHECK(code_of([] {
          MatrixWeightedGraph<double> other(GraphDimensions(3, 2));
          build_switching_signal<double>({fixture::g1(), other}, {{0, 1.0}}, 0.5, 4.0);
        }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([] { build_switching_signal<double>({fixture::g1()}, {{3, 1.0}}, 0.5, 4.0); }) ==
        ErrorCode::IndexOutOfRange);
}

TEST_CASE("build_periodic_signal") {
  const auto p = fixture::periodic_signal();
  CHECK(p.partitions() == 3);
  CHECK(p.period() == 6);

  CHECK(code_of([] {
          auto two = build_switching_signal<double>({fixture::g1(), fixture::g2()}, {{0, 2.0}, {1, 3.0}}, 0.5, 4.0);
          build_periodic_signal(two, 5.0);
        }) == ErrorCode::TooFewPartitions);
  CHECK(code_of([] { build_periodic_signal(fixture::base_signal(), 7.0); }) == ErrorCode::PeriodMismatch);
  // periodic dwells must sit strictly above alpha
  CHECK(code_of([] {
          auto tight = build_switching_signal<double>({fixture::g1()}, {{0, 0.5}, {0, 1.0}, {0, 1.0}}, 0.5, 4.0);
          build_periodic_signal(tight, 2.5);
        }) == ErrorCode::DwellOutOfBounds);
}

TEST_CASE("graph_at uses half-open intervals") {
  const auto s = fixture::base_signal();
  CHECK(graph_at(s, 0.0) == 0);
  CHECK(graph_at(s, 1.999) == 0);
  CHECK(graph_at(s, 2.0) == 1);
  CHECK(graph_at(s, 5.0) == 2);
  CHECK(code_of([&] { graph_at(s, 6.0); }) == ErrorCode::TimeOutOfRange);
  CHECK(code_of([&] { graph_at(s, -0.1); }) == ErrorCode::TimeOutOfRange);

  const auto p = fixture::periodic_signal();
  CHECK(graph_at(p, 6.0) == 0);
  CHECK(graph_at(p, 8.0) == 1);
  CHECK(graph_at(p, 605.5) == 2);
}

TEST_CASE("integral network over one period") {
  const auto net = integral_network(fixture::base_signal(), 0.0, 6.0);
  // hand quadrature: A12 = 2/6 A12(G1), A23 = (2 A23(G1) + A23(G3)) / 6
  const Mat a12 = net.graph.edge(0, 1)->entries;
  CHECK((a12 - mat2(1, 1, 1, 2) / 3.0).cwiseAbs().maxCoeff() < 1e-15);
  const Mat a23 = net.graph.edge(1, 2)->entries;
  CHECK((a23 - mat2(0.5, 1.0 / 6, 1.0 / 6, 2.0 / 3)).cwiseAbs().maxCoeff() < 1e-15);

  std::vector<EdgeKey> keys;
  for (const auto& [ij, w] : net.graph.edges()) keys.push_back(ij);
  CHECK(keys == std::vector<EdgeKey>{{0, 1}, {1, 2}, {1, 3}, {2, 3}});
  CHECK(net.graph.edge(0, 1)->kind == Definiteness::PositiveDefinite);
  CHECK(net.graph.edge(1, 2)->kind == Definiteness::PositiveDefinite);
  CHECK(net.graph.edge(1, 3)->kind == Definiteness::PositiveDefinite);
  CHECK(net.graph.edge(2, 3)->kind == Definiteness::PositiveSemiDefinite);

  // elementwise summation oracle on the printed matrices
  const Mat expected = (2 * fixture::printed_l1() + 3 * fixture::printed_l2() + fixture::printed_l3()) / 6.0;
  CHECK((integral_laplacian(net).matrix - expected).cwiseAbs().maxCoeff() < 1e-15);

  const auto ns = null_space_basis<double>(integral_laplacian(net).matrix, fixture::kDims);
  CHECK(ns.dimension == 2);
  CHECK(8 - oracle::gaussian_rank(expected, 1e-9) == 2);
  CHECK(ns.equals_consensus);
}

TEST_CASE("single-segment spans reproduce the segment graph exactly") {
  const auto net = integral_network(fixture::base_signal(), 0.0, 2.0);
  CHECK(integral_laplacian(net).matrix == fixture::printed_l1());
  CHECK(net.graph.edge(0, 1)->entries == mat2(1, 1, 1, 2));
  CHECK(net.graph.edge(1, 2)->entries == mat2(1, 1, 1, 1));
  CHECK(net.graph.edge_count() == 2);

  const auto mid = integral_network(fixture::base_signal(), 2.5, 4.0);
  CHECK(integral_laplacian(mid).matrix == fixture::printed_l2());
}

TEST_CASE("integral_network errors") {
  const auto s = fixture::base_signal();
  CHECK(code_of([&] { integral_network(s, 2.0, 2.0); }) == ErrorCode::EmptySpan);
  CHECK(code_of([&] { integral_network(s, 0.0, 6.5); }) == ErrorCode::TimeOutOfRange);
  CHECK_NOTHROW(integral_network(fixture::periodic_signal(), 0.0, 6.5));
}

TEST_CASE("periodic integral networks repeat every period") {
  const auto p = fixture::periodic_signal();
  const Mat first = integral_laplacian(integral_network(p, 0.0, 6.0)).matrix;
  for (int l = 1; l < 6; ++l) {
    const Mat later = integral_laplacian(integral_network(p, 6.0 * l, 6.0 * (l + 1))).matrix;
    CHECK((later - first).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("integral network properties over random signals") {
  std::mt19937_64 rng(fixture::seed(29));
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = fixture::random_signal(rng);
    const double total = s.total_duration();
    std::uniform_real_distribution<double> u(0.0, total);
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    if (b - a < 1e-3) continue;
    const double m = std::uniform_real_distribution<double>(a, b)(rng);
    if (m - a < 1e-6 || b - m < 1e-6) continue;

    const auto whole = integral_network(s, a, b);
    const Mat lhs = (b - a) * integral_laplacian(whole).matrix;
    const Mat rhs = (m - a) * integral_laplacian(integral_network(s, a, m)).matrix +
                    (b - m) * integral_laplacian(integral_network(s, m, b)).matrix;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, lhs.cwiseAbs().maxCoeff()));

    const Mat& lt = integral_laplacian(whole).matrix;
    CHECK(symmetric_eigen<double>(lt).eigenvalues(0) >= -1e-9 * std::max(1.0, lt.norm()));

    const auto d = s.dims().d;
    for (Index i = 0; i < s.dims().n; ++i)
      for (Index j = 0; j < s.dims().n; ++j) {
        const Mat block = whole.avg_adjacency.block(i * d, j * d, d, d);
        CHECK((block - block.transpose()).cwiseAbs().maxCoeff() == 0.0);
        if (i != j && !whole.graph.edge(i, j)) CHECK(block.cwiseAbs().maxCoeff() <= 1e-12);
      }
  }
}
