#include <random>

#include "doctest.h"
#include "matcon/analysis.hpp"
#include "support/random.hpp"
#include "support/example_network.hpp"

using namespace matcon;
using fixture::Mat;
using fixture::mat2;

TEST_CASE("new_graph validates dimensions") {
  const auto g = new_graph<double>(GraphDimensions(4, 2));
  CHECK(g.dims().n == 4);
  CHECK(g.edge_count() == 0);
  CHECK_NOTHROW(GraphDimensions(2, 1));
  CHECK_THROWS_AS(GraphDimensions(1, 2), Error);
  CHECK_THROWS_AS(GraphDimensions(3, 0), Error);
}

TEST_CASE("set_edge classifies and validates weights") {
  MatrixWeightedGraph<double> g(fixture::kDims);
  g.set_edge(0, 1, mat2(1, 1, 1, 2));
  g.set_edge(1, 2, mat2(1, 1, 1, 1));
  REQUIRE(g.edge(1, 0) != nullptr);
  CHECK(g.edge(0, 1)->kind == Definiteness::PositiveDefinite);
  CHECK(g.edge(2, 1)->kind == Definiteness::PositiveSemiDefinite);
  CHECK(g.edge(0, 3) == nullptr);

  auto code_of = [&](Index i, Index j, const Mat& w) {
    try {
      MatrixWeightedGraph<double> h(fixture::kDims);
      h.set_edge(i, j, w);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ParseError;  // sentinel: no throw
  };
  CHECK(code_of(0, 1, mat2(1, 2, 1, 1)) == ErrorCode::AsymmetricWeight);
  CHECK(code_of(0, 1, mat2(1, 3, 3, 1)) == ErrorCode::IndefiniteWeight);
  CHECK(code_of(0, 1, mat2(-1, 0, 0, -2)) == ErrorCode::IndefiniteWeight);
  CHECK(code_of(0, 1, mat2(0, 0, 0, 0)) == ErrorCode::ZeroWeight);
  CHECK(code_of(2, 2, mat2(1, 0, 0, 1)) == ErrorCode::SelfLoop);
  CHECK(code_of(0, 4, mat2(1, 0, 0, 1)) == ErrorCode::NodeOutOfRange);
  CHECK(code_of(0, 1, Mat::Identity(3, 3)) == ErrorCode::DimensionMismatch);
}

TEST_CASE("nearly symmetric weights are symmetrized") {
  MatrixWeightedGraph<double> g(GraphDimensions(2, 2));
  Mat w = mat2(2, 1, 1 + 1e-13, 2);
  g.set_edge(0, 1, w);
  const Mat& stored = g.edge(0, 1)->entries;
  CHECK(stored(0, 1) == stored(1, 0));
}

TEST_CASE("set_edge free function leaves its input untouched") {
  const MatrixWeightedGraph<double> empty(fixture::kDims);
  const auto one = set_edge(empty, 0, 1, Mat(Mat::Identity(2, 2)));
  CHECK(empty.edge_count() == 0);
  CHECK(one.edge_count() == 1);
}

TEST_CASE("degree_matrix") {
  const Mat c3 = degree_matrix(fixture::g3());
  CHECK(c3.block(2, 2, 2, 2) == mat2(1, -1, -1, 2));
  CHECK(c3.block(0, 0, 2, 2).isZero(0));
  CHECK(c3.block(6, 6, 2, 2).isZero(0));
  CHECK(degree_matrix(fixture::g2()).block(6, 6, 2, 2) == mat2(2, 0, 0, 2));
  CHECK(degree_matrix(MatrixWeightedGraph<double>(fixture::kDims)).isZero(0));
}

TEST_CASE("laplacian reproduces the printed example matrices exactly") {
  CHECK(laplacian(fixture::g1()).matrix == fixture::printed_l1());
  CHECK(laplacian(fixture::g2()).matrix == fixture::printed_l2());
  CHECK(laplacian(fixture::g3()).matrix == fixture::printed_l3());
  CHECK(laplacian(MatrixWeightedGraph<double>(fixture::kDims)).matrix.isZero(0));
}

TEST_CASE("laplacian invariants on random graphs") {
  std::mt19937_64 rng(fixture::seed(5));
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 100; ++trial) {
    const GraphDimensions dims(std::uniform_int_distribution<Index>(2, 6)(rng),
                               std::uniform_int_distribution<Index>(1, 3)(rng));
    const auto g = fixture::random_graph(rng, dims, 0.5);
    const Mat l = laplacian(g).matrix;
    CHECK(l == l.transpose());
    CHECK(symmetric_eigen<double>(l).eigenvalues(0) >= -1e-9 * std::max(1.0, l.norm()));

    Eigen::VectorXd v(dims.d);
    for (Index i = 0; i < dims.d; ++i) v(i) = normal(rng);
    const Eigen::VectorXd stacked = v.replicate(dims.n, 1);
    CHECK((l * stacked).norm() <= 1e-12 * std::max(1.0, l.norm()) * v.norm());

    // off-diagonal blocks round-trip bit-for-bit
    for (const auto& [ij, w] : g.edges())
      CHECK(Mat(-l.block(ij.first * dims.d, ij.second * dims.d, dims.d, dims.d)) == w.entries);
  }
}

TEST_CASE("PD spanning tree graphs have null space of dimension exactly d") {
  std::mt19937_64 rng(fixture::seed(17));
  for (int trial = 0; trial < 100; ++trial) {
    const GraphDimensions dims(std::uniform_int_distribution<Index>(2, 6)(rng),
                               std::uniform_int_distribution<Index>(1, 3)(rng));
    MatrixWeightedGraph<double> g(dims);
    // random tree: attach node k to a random earlier node with a PD weight
    for (Index k = 1; k < dims.n; ++k) {
      Mat w = fixture::random_weight(rng, dims.d);
      w += Mat::Identity(dims.d, dims.d);
      g.set_edge(std::uniform_int_distribution<Index>(0, k - 1)(rng), k, w);
    }
    // extra PSD edges never shrink the null space below R
    for (Index i = 0; i < dims.n; ++i)
      for (Index j = i + 1; j < dims.n; ++j)
        if (!g.edge(i, j) && std::bernoulli_distribution(0.3)(rng)) {
          Eigen::VectorXd b = Eigen::VectorXd::Ones(dims.d);
          g.set_edge(i, j, Mat(b * b.transpose()));
        }
    REQUIRE(positive_spanning_tree(g).exists);
    const auto ns = null_space_basis<double>(laplacian(g).matrix, dims);
    CHECK(ns.dimension == dims.d);
    CHECK(ns.equals_consensus);
  }
}
