#pragma once

#include <cmath>

namespace gilbert {

// Streaming mean/variance (Welford) with the exact pairwise merge rule. With
// fixed chunk boundaries and a fixed merge order, chunked parallel
// accumulation reproduces the single-threaded result bit for bit.
struct RunningStats {
  long long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const RunningStats& other) {
    if (other.n == 0) return;
    if (n == 0) {
      *this = other;
      return;
    }
    const double d = other.mean - mean;
    const double na = static_cast<double>(n);
    const double nb = static_cast<double>(other.n);
    const double nt = na + nb;
    mean += d * (nb / nt);
    m2 += other.m2 + d * d * (na * nb / nt);
    n += other.n;
  }

  double sample_variance() const {
    return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  }

  double std_error() const {
    return n > 0 ? std::sqrt(sample_variance() / static_cast<double>(n)) : 0.0;
  }
};

struct EstimateResult {
  double estimate = 0.0;
  double std_error = 0.0;
  double sample_variance = 0.0;
  long long n_samples = 0;
  double seconds = 0.0;
};

inline EstimateResult to_result(const RunningStats& stats, double seconds) {
  return {stats.mean, stats.std_error(), stats.sample_variance(), stats.n,
          seconds};
}

}  // namespace gilbert
