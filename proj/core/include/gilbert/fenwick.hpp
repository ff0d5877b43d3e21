#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gilbert {

// Fenwick tree over non-negative weights with O(log n) point updates, prefix
// sums, and cumulative-weight sampling. Weight updates are applied as exact
// deltas, so integer-valued weights (the gamma = 1 case of the importance
// samplers) keep every internal node an exact integer.
class FenwickTree {
 public:
  explicit FenwickTree(std::size_t n = 0) { reset(n); }

  void reset(std::size_t n) {
    n_ = n;
    tree_.assign(n + 1, 0.0);
    value_.assign(n, 0.0);
    top_ = 1;
    while (top_ * 2 <= n_) top_ *= 2;
  }

  // Bulk initialization in O(n).
  void build(std::span<const double> values) {
    reset(values.size());
    for (std::size_t i = 0; i < n_; ++i) {
      value_[i] = values[i];
      tree_[i + 1] += values[i];
      const std::size_t parent = (i + 1) + lowbit(i + 1);
      if (parent <= n_) tree_[parent] += tree_[i + 1];
    }
  }

  std::size_t size() const { return n_; }
  double value(std::size_t i) const { return value_[i]; }
  double total() const { return prefix(n_); }

  void set(std::size_t i, double v) {
    const double delta = v - value_[i];
    value_[i] = v;
    for (std::size_t j = i + 1; j <= n_; j += lowbit(j)) tree_[j] += delta;
  }

  // Sum of values over [0, count).
  double prefix(std::size_t count) const {
    double s = 0.0;
    for (std::size_t j = count; j > 0; j -= lowbit(j)) s += tree_[j];
    return s;
  }

  // Smallest index i with value[0] + ... + value[i] > x; never lands on a
  // zero-weight index. Requires 0 <= x < total(); returns size() if x >= total.
  std::size_t sample(double x) const {
    std::size_t idx = 0;
    for (std::size_t bit = top_; bit > 0; bit >>= 1) {
      const std::size_t next = idx + bit;
      if (next <= n_ && tree_[next] <= x) {
        idx = next;
        x -= tree_[next];
      }
    }
    return idx;
  }

 private:
  static std::size_t lowbit(std::size_t j) { return j & (~j + 1); }

  std::size_t n_ = 0;
  std::size_t top_ = 1;
  std::vector<double> tree_;
  std::vector<double> value_;
};

}  // namespace gilbert
