#include "gilbert/grid.hpp"

namespace gilbert {

long long count_edges(const std::vector<std::vector<double>>& points) {
  const std::size_t n = points.size();
  for (const auto& p : points) {
    if (p.size() != points.front().size()) {
      throw std::invalid_argument("count_edges: mixed point dimensions");
    }
    for (const double v : p) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("count_edges: non-finite coordinate");
      }
    }
  }
  long long edges = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < points[i].size(); ++k) {
        const double d = points[i][k] - points[j][k];
        d2 += d * d;
      }
      if (d2 <= 1.0) ++edges;
    }
  }
  return edges;
}

}  // namespace gilbert
