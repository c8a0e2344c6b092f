#pragma once

#include <span>
#include <vector>

#include "fmpp/pattern.hpp"

namespace fmpp {

// Dense symmetric Euclidean distance table. O(n^2) memory; meant for small
// patterns and as the reference structure in tests.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::span<const GroundPoint> points);

  double at(int i, int j) const { return d_[static_cast<std::size_t>(i) * n_ + j]; }
  int size() const { return static_cast<int>(n_); }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

// Fixed-radius neighbor lists built with a uniform cell grid: for each point
// i, all j != i with ||x_j - x_i|| <= r_max, sorted by distance (ties by
// index). Read-only after construction.
class NeighborLists {
 public:
  struct Neighbor {
    int index;
    double dist;
  };

  NeighborLists(std::span<const GroundPoint> points, const Window& window, double r_max);

  std::span<const Neighbor> of(int i) const {
    return {lists_.data() + offsets_[static_cast<std::size_t>(i)],
            offsets_[static_cast<std::size_t>(i) + 1] - offsets_[static_cast<std::size_t>(i)]};
  }

  // Exactly {j != i : ||x_j - x_i|| <= r}; requires r <= r_max.
  std::vector<int> neighbors(int i, double r) const;

  double r_max() const { return r_max_; }
  int size() const { return static_cast<int>(offsets_.size()) - 1; }

 private:
  double r_max_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> lists_;
};

}  // namespace fmpp
