#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <numeric>
#include <vector>

namespace skewnet::detail {

/// Union-find with path halving; the smaller id becomes the root.
class DisjointSets {
  public:
    explicit DisjointSets(Eigen::Index n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    Eigen::Index find(Eigen::Index x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(Eigen::Index a, Eigen::Index b) {
        a = find(a);
        b = find(b);
        if (a != b)
            parent_[std::max(a, b)] = std::min(a, b);
    }

  private:
    std::vector<Eigen::Index> parent_;
};

} // namespace skewnet::detail
