#include "fmpp/neighbors.hpp"

#include <algorithm>
#include <cmath>

#include "fmpp/errors.hpp"

namespace fmpp {

DistanceMatrix::DistanceMatrix(std::span<const GroundPoint> points)
    : n_(points.size()), d_(points.size() * points.size(), 0.0) {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) {
      double d = distance(points[i], points[j]);
      d_[i * n_ + j] = d;
      d_[j * n_ + i] = d;
    }
}

NeighborLists::NeighborLists(std::span<const GroundPoint> points, const Window& window,
                             double r_max)
    : r_max_(r_max) {
  require(r_max > 0.0, "neighbor radius must be positive");
  const int n = static_cast<int>(points.size());

  // Bin points into cells of side r_max so only the 3x3 block around a point
  // needs scanning.
  int nx = std::max(1, static_cast<int>(std::floor(window.width() / r_max)));
  int ny = std::max(1, static_cast<int>(std::floor(window.height() / r_max)));
  nx = std::min(nx, 1024);
  ny = std::min(ny, 1024);
  double cw = window.width() / nx;
  double ch = window.height() / ny;

  auto cell_of = [&](const GroundPoint& p) {
    int cx = std::min(nx - 1, std::max(0, static_cast<int>((p.x - window.x_min) / cw)));
    int cy = std::min(ny - 1, std::max(0, static_cast<int>((p.y - window.y_min) / ch)));
    return cy * nx + cx;
  };

  std::vector<std::vector<int>> cells(static_cast<std::size_t>(nx) * ny);
  for (int i = 0; i < n; ++i) cells[static_cast<std::size_t>(cell_of(points[i]))].push_back(i);

  offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Neighbor> scratch;
  std::vector<std::vector<Neighbor>> per_point(static_cast<std::size_t>(n));

  for (int i = 0; i < n; ++i) {
    scratch.clear();
    int cx = std::min(nx - 1, std::max(0, static_cast<int>((points[i].x - window.x_min) / cw)));
    int cy = std::min(ny - 1, std::max(0, static_cast<int>((points[i].y - window.y_min) / ch)));
    for (int dy = -1; dy <= 1; ++dy) {
      int yy = cy + dy;
      if (yy < 0 || yy >= ny) continue;
      for (int dx = -1; dx <= 1; ++dx) {
        int xx = cx + dx;
        if (xx < 0 || xx >= nx) continue;
        for (int j : cells[static_cast<std::size_t>(yy) * nx + xx]) {
          if (j == i) continue;
          double d = distance(points[i], points[static_cast<std::size_t>(j)]);
          if (d <= r_max) scratch.push_back({j, d});
        }
      }
    }
    std::sort(scratch.begin(), scratch.end(), [](const Neighbor& a, const Neighbor& b) {
      if (a.dist != b.dist) return a.dist < b.dist;
      return a.index < b.index;
    });
    per_point[static_cast<std::size_t>(i)] = scratch;
    offsets_[static_cast<std::size_t>(i) + 1] =
        offsets_[static_cast<std::size_t>(i)] + scratch.size();
  }

  lists_.reserve(offsets_.back());
  for (auto& list : per_point)
    lists_.insert(lists_.end(), list.begin(), list.end());
}

std::vector<int> NeighborLists::neighbors(int i, double r) const {
  require(r <= r_max_, "query radius exceeds the structure's r_max");
  std::vector<int> out;
  for (const auto& nb : of(i)) {
    if (nb.dist > r) break;
    out.push_back(nb.index);
  }
  return out;
}

}  // namespace fmpp
