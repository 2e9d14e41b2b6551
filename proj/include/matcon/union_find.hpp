#pragma once

#include <numeric>
#include <vector>

#include "matcon/types.hpp"

namespace matcon {

class UnionFind {
 public:
  explicit UnionFind(Index n) : parent_(n), rank_(n, 0), components_(n) {
    std::iota(parent_.begin(), parent_.end(), Index(0));
  }

  Index find(Index x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  /// Returns false when x and y were already connected.
  bool unite(Index x, Index y) {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    if (rank_[x] < rank_[y]) std::swap(x, y);
    parent_[y] = x;
    if (rank_[x] == rank_[y]) ++rank_[x];
    --components_;
    return true;
  }

  Index components() const { return components_; }

 private:
  std::vector<Index> parent_;
  std::vector<int> rank_;
  Index components_;
};

}  // namespace matcon
