#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gilbert {

// Axis-aligned sampling window W = prod_i [lower_i, upper_i].
struct Window {
  std::vector<double> lower;
  std::vector<double> upper;

  Window() = default;

  Window(std::vector<double> lo, std::vector<double> hi)
      : lower(std::move(lo)), upper(std::move(hi)) {
    validate();
  }

  // [0, s_1] x ... x [0, s_d]
  static Window box(const std::vector<double>& sides) {
    return Window(std::vector<double>(sides.size(), 0.0), sides);
  }

  static Window interval(double w) { return box({w}); }

  int dim() const { return static_cast<int>(lower.size()); }

  double side(int i) const { return upper[i] - lower[i]; }

  double volume() const {
    double v = 1.0;
    for (int i = 0; i < dim(); ++i) v *= side(i);
    return v;
  }

  bool contains(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim()) return false;
    for (int i = 0; i < dim(); ++i) {
      if (x[i] < lower[i] || x[i] > upper[i]) return false;
    }
    return true;
  }

  void validate() const {
    if (lower.empty() || lower.size() != upper.size()) {
      throw std::invalid_argument(
          "window: lower and upper must be non-empty and of equal dimension");
    }
    for (std::size_t i = 0; i < lower.size(); ++i) {
      if (!(upper[i] > lower[i])) {
        throw std::invalid_argument(
            "window: upper must exceed lower in coordinate " +
            std::to_string(i));
      }
    }
  }
};

}  // namespace gilbert
