#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "gilbert/window.hpp"

namespace gilbert {

// Brute-force O(n^2) pair count at the unit threshold; the test oracle for the
// incremental structure below. Distance exactly 1 counts as an edge.
long long count_edges(const std::vector<std::vector<double>>& points);

// Unit-threshold Gilbert graph over a point set in a window, maintained
// incrementally. Points carry stable integer ids in insertion order; removal
// never renumbers. Neighbor search uses a uniform bucket grid whose cells have
// side >= 1 (exactly 1 when the window sides are integers), so every point at
// distance <= 1 lives in one of the 3^d cells around the query point.
class PointConfiguration {
 public:
  static constexpr int kMaxDim = 8;

  explicit PointConfiguration(const Window& window)
      : window_(window), dim_(window.dim()) {
    if (dim_ > kMaxDim) {
      throw std::invalid_argument(
          "PointConfiguration: dimension exceeds supported maximum of 8");
    }
    long long total = 1;
    for (int i = 0; i < dim_; ++i) {
      const double len = window_.side(i);
      const int n = std::max(1, static_cast<int>(std::floor(len)));
      ncells_[i] = n;
      scale_[i] = static_cast<double>(n) / len;
      total *= n;
    }
    cells_.resize(static_cast<std::size_t>(total));
  }

  int dim() const { return dim_; }
  const Window& window() const { return window_; }

  long long edge_count() const { return edges_; }
  int n_alive() const { return n_alive_; }
  // Ids ever issued lie in [0, max_id()).
  int max_id() const { return static_cast<int>(alive_.size()); }

  bool alive(int id) const {
    return id >= 0 && id < max_id() && alive_[id] != 0;
  }

  int degree(int id) const {
    require_alive(id, "degree");
    return deg_[id];
  }

  std::span<const double> point(int id) const {
    require_alive(id, "point");
    return {coords_.data() + static_cast<std::size_t>(id) * dim_,
            static_cast<std::size_t>(dim_)};
  }

  int insert_point(std::span<const double> x) {
    if (!window_.contains(x)) {
      throw std::invalid_argument("insert_point: point outside window");
    }
    const int id = max_id();
    coords_.insert(coords_.end(), x.begin(), x.end());
    int gained = 0;
    visit_neighbors(x, id, [&](int j) {
      ++deg_[j];
      ++gained;
    });
    deg_.push_back(gained);
    alive_.push_back(1);
    edges_ += gained;
    const int cell = cell_of(x);
    cell_index_.push_back(cell);
    cells_[cell].push_back(id);
    ++n_alive_;
    return id;
  }

  void remove_point(int id) {
    require_alive(id, "remove_point");
    const std::span<const double> x = {
        coords_.data() + static_cast<std::size_t>(id) * dim_,
        static_cast<std::size_t>(dim_)};
    visit_neighbors(x, id, [&](int j) { --deg_[j]; });
    edges_ -= deg_[id];
    deg_[id] = 0;
    auto& bucket = cells_[cell_index_[id]];
    bucket.erase(std::find(bucket.begin(), bucket.end(), id));
    alive_[id] = 0;
    --n_alive_;
  }

  // Visit ids of alive points within distance <= 1 of x, excluding skip_id.
  template <class Fn>
  void for_each_neighbor(std::span<const double> x, int skip_id,
                         Fn&& fn) const {
    visit_neighbors(x, skip_id, fn);
  }

  // Drop all points but keep allocated capacity; cost O(points).
  void clear() {
    for (std::size_t id = 0; id < cell_index_.size(); ++id) {
      cells_[cell_index_[id]].clear();
    }
    coords_.clear();
    deg_.clear();
    alive_.clear();
    cell_index_.clear();
    edges_ = 0;
    n_alive_ = 0;
  }

 private:
  void require_alive(int id, const char* op) const {
    if (!alive(id)) {
      throw std::invalid_argument(std::string(op) +
                                  ": unknown or removed point id");
    }
  }

  int cell_coord(int axis, double v) const {
    const int c = static_cast<int>((v - window_.lower[axis]) * scale_[axis]);
    return std::clamp(c, 0, ncells_[axis] - 1);
  }

  int cell_of(std::span<const double> x) const {
    int cell = 0;
    for (int i = 0; i < dim_; ++i) {
      cell = cell * ncells_[i] + cell_coord(i, x[i]);
    }
    return cell;
  }

  template <class Fn>
  void visit_neighbors(std::span<const double> x, int skip_id, Fn&& fn) const {
    int lo[kMaxDim];
    int hi[kMaxDim];
    int at[kMaxDim];
    for (int i = 0; i < dim_; ++i) {
      const int c = cell_coord(i, x[i]);
      lo[i] = std::max(0, c - 1);
      hi[i] = std::min(ncells_[i] - 1, c + 1);
      at[i] = lo[i];
    }
    for (;;) {
      int cell = 0;
      for (int i = 0; i < dim_; ++i) cell = cell * ncells_[i] + at[i];
      for (const int j : cells_[cell]) {
        if (j == skip_id) continue;
        const double* p = coords_.data() + static_cast<std::size_t>(j) * dim_;
        double d2 = 0.0;
        for (int i = 0; i < dim_; ++i) {
          const double d = x[i] - p[i];
          d2 += d * d;
        }
        if (d2 <= 1.0) fn(j);
      }
      int axis = dim_ - 1;
      while (axis >= 0 && at[axis] == hi[axis]) {
        at[axis] = lo[axis];
        --axis;
      }
      if (axis < 0) break;
      ++at[axis];
    }
  }

  Window window_;
  int dim_;
  int ncells_[kMaxDim] = {};
  double scale_[kMaxDim] = {};
  std::vector<std::vector<int>> cells_;
  std::vector<double> coords_;
  std::vector<int> deg_;
  std::vector<char> alive_;
  std::vector<int> cell_index_;
  long long edges_ = 0;
  int n_alive_ = 0;
};

}  // namespace gilbert
