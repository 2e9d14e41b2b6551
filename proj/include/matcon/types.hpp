#pragma once

#include <Eigen/Core>

#include "matcon/error.hpp"

namespace matcon {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Node count n and per-node state dimension d. Stacked vectors have length d*n.
struct GraphDimensions {
  Index n = 0;
  Index d = 0;

  GraphDimensions() = default;
  GraphDimensions(Index nodes, Index dim) : n(nodes), d(dim) {
    if (n < 2) throw Error(ErrorCode::InvalidDimensions, "node count must be >= 2");
    if (d < 1) throw Error(ErrorCode::InvalidDimensions, "state dimension must be >= 1");
  }

  Index size() const { return n * d; }

  friend bool operator==(const GraphDimensions&, const GraphDimensions&) = default;
};

}  // namespace matcon
