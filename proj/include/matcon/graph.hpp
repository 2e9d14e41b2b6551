#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "matcon/spectral.hpp"

namespace matcon {

/// Symmetric d x d edge weight together with its definiteness class.
template <typename Scalar>
struct WeightMatrix {
  Matrix<Scalar> entries;
  Definiteness kind = Definiteness::PositiveDefinite;

  bool positive_definite() const { return kind == Definiteness::PositiveDefinite; }
};

/// Validates and symmetrizes a candidate edge weight. Throws on asymmetric,
/// indefinite or zero input.
template <typename Scalar>
WeightMatrix<Scalar> make_weight(const Matrix<Scalar>& w, const Tolerances<Scalar>& tol = {}) {
  if (!is_symmetric(w, tol.symmetry))
    throw Error(ErrorCode::AsymmetricWeight, "edge weight is not symmetric");
  Matrix<Scalar> sym = (w + w.transpose()) / Scalar(2);
  const Scalar cut = tol.definiteness * std::max(Scalar(1), max_abs(sym));
  const auto kind = classify_definiteness(sym, cut);
  if (kind == Definiteness::Indefinite)
    throw Error(ErrorCode::IndefiniteWeight, "edge weight has a negative eigenvalue");
  if (kind == Definiteness::Zero)
    throw Error(ErrorCode::ZeroWeight, "zero edge weight; omit the edge instead");
  return {std::move(sym), kind};
}

/// Undirected edge key, always stored with first < second (0-based).
using EdgeKey = std::pair<Index, Index>;

/// Undirected graph on n nodes whose edges carry d x d PSD weights.
template <typename Scalar>
class MatrixWeightedGraph {
 public:
  using EdgeMap = std::map<EdgeKey, WeightMatrix<Scalar>>;

  MatrixWeightedGraph() = default;
  explicit MatrixWeightedGraph(GraphDimensions dims) : dims_(dims) {}

  const GraphDimensions& dims() const { return dims_; }
  const EdgeMap& edges() const { return edges_; }
  Index edge_count() const { return static_cast<Index>(edges_.size()); }

  /// Inserts or replaces edge {i, j} (0-based).
  MatrixWeightedGraph& set_edge(Index i, Index j, const Matrix<Scalar>& w,
                                const Tolerances<Scalar>& tol = {}) {
    if (i == j) throw Error(ErrorCode::SelfLoop, "self loops are not allowed");
    if (i < 0 || j < 0 || i >= dims_.n || j >= dims_.n)
      throw Error(ErrorCode::NodeOutOfRange, "node index out of range");
    if (w.rows() != dims_.d || w.cols() != dims_.d)
      throw Error(ErrorCode::DimensionMismatch, "edge weight must be d x d");
    edges_.insert_or_assign(key(i, j), make_weight(w, tol));
    return *this;
  }

  /// Stored weight of {i, j}, or nullptr when absent.
  const WeightMatrix<Scalar>* edge(Index i, Index j) const {
    auto it = edges_.find(key(i, j));
    return it == edges_.end() ? nullptr : &it->second;
  }

  static EdgeKey key(Index i, Index j) { return i < j ? EdgeKey{i, j} : EdgeKey{j, i}; }

 private:
  GraphDimensions dims_;
  EdgeMap edges_;
};

/// Returns a copy of `graph` with edge {i, j} set.
template <typename Scalar>
MatrixWeightedGraph<Scalar> set_edge(MatrixWeightedGraph<Scalar> graph, Index i, Index j,
                                     const Matrix<Scalar>& w, const Tolerances<Scalar>& tol = {}) {
  graph.set_edge(i, j, w, tol);
  return graph;
}

template <typename Scalar>
MatrixWeightedGraph<Scalar> new_graph(GraphDimensions dims) {
  return MatrixWeightedGraph<Scalar>(dims);
}

template <typename Scalar>
struct BlockLaplacian {
  GraphDimensions dims;
  Matrix<Scalar> matrix;
};

template <typename Scalar>
Matrix<Scalar> adjacency_matrix(const MatrixWeightedGraph<Scalar>& g) {
  const Index d = g.dims().d;
  Matrix<Scalar> a = Matrix<Scalar>::Zero(g.dims().size(), g.dims().size());
  for (const auto& [ij, w] : g.edges()) {
    a.block(ij.first * d, ij.second * d, d, d) = w.entries;
    a.block(ij.second * d, ij.first * d, d, d) = w.entries;
  }
  return a;
}

template <typename Scalar>
Matrix<Scalar> degree_matrix(const MatrixWeightedGraph<Scalar>& g) {
  const Index d = g.dims().d;
  Matrix<Scalar> c = Matrix<Scalar>::Zero(g.dims().size(), g.dims().size());
  for (const auto& [ij, w] : g.edges()) {
    c.block(ij.first * d, ij.first * d, d, d) += w.entries;
    c.block(ij.second * d, ij.second * d, d, d) += w.entries;
  }
  return c;
}

/// L = C - A.
template <typename Scalar>
BlockLaplacian<Scalar> laplacian(const MatrixWeightedGraph<Scalar>& g) {
  return {g.dims(), degree_matrix(g) - adjacency_matrix(g)};
}

}  // namespace matcon
