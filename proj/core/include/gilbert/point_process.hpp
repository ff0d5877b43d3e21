#pragma once

#include <stdexcept>
#include <vector>

#include "gilbert/rng.hpp"
#include "gilbert/window.hpp"

namespace gilbert {

// Homogeneous Poisson process on [0, w] via partial sums of Exp(lambda)
// spacings; output is sorted by construction.
inline std::vector<double> sample_poisson_1d(double lambda, double w,
                                             RngStream& rng) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("sample_poisson_1d: lambda must be positive");
  }
  if (!(w > 0.0)) {
    throw std::invalid_argument("sample_poisson_1d: w must be positive");
  }
  std::vector<double> points;
  double x = rng.exponential(lambda);
  while (x <= w) {
    points.push_back(x);
    x += rng.exponential(lambda);
  }
  return points;
}

// n iid uniform points in the window, returned flat (point i occupies
// [i*dim, (i+1)*dim)).
inline std::vector<double> sample_uniform_stream(const Window& window,
                                                 long long n, RngStream& rng) {
  if (n < 0) {
    throw std::invalid_argument("sample_uniform_stream: n must be >= 0");
  }
  const int d = window.dim();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n) * d);
  for (long long i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      out.push_back(rng.uniform(window.lower[j], window.upper[j]));
    }
  }
  return out;
}

}  // namespace gilbert
