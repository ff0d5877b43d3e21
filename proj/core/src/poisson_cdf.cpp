#include "gilbert/poisson_cdf.hpp"

#include <cmath>
#include <stdexcept>

namespace gilbert {

namespace {

double log_pmf(double k, double mean) {
  return k * std::log(mean) - mean - std::lgamma(k + 1.0);
}

}  // namespace

double poisson_cdf(long long k, double mean) {
  if (!(mean > 0.0)) {
    throw std::invalid_argument("poisson_cdf: mean must be positive");
  }
  if (k < 0) {
    throw std::invalid_argument("poisson_cdf: k must be non-negative");
  }
  const double kd = static_cast<double>(k);
  if (kd <= mean) {
    // Left sum, largest term first; terms decay geometrically below the mean.
    const double t0 = std::exp(log_pmf(kd, mean));
    long double sum = t0;
    long double term = t0;
    for (double j = kd; j >= 1.0; j -= 1.0) {
      term *= static_cast<long double>(j) / mean;
      sum += term;
      if (term < sum * 1e-20L) break;
    }
    return static_cast<double>(sum);
  }
  // Complement of the upper tail, again largest term first.
  const double t0 = std::exp(log_pmf(kd + 1.0, mean));
  long double tail = t0;
  long double term = t0;
  for (double j = kd + 2.0;; j += 1.0) {
    term *= mean / static_cast<long double>(j);
    tail += term;
    if (term < tail * 1e-20L || term == 0.0L) break;
  }
  const long double cdf = 1.0L - tail;
  return cdf < 0.0L ? 0.0 : static_cast<double>(cdf);
}

PoissonCdfTable::PoissonCdfTable(double mean, long long k_max) : mean_(mean) {
  if (!(mean > 0.0)) {
    throw std::invalid_argument("PoissonCdfTable: mean must be positive");
  }
  if (k_max < 0) {
    k_max = static_cast<long long>(std::ceil(mean + 20.0 * std::sqrt(mean))) +
            256;
  }
  cdf_.resize(static_cast<std::size_t>(k_max) + 1);
  long double sum = 0.0L;
  for (long long j = 0; j <= k_max; ++j) {
    sum += std::exp(log_pmf(static_cast<double>(j), mean));
    cdf_[static_cast<std::size_t>(j)] =
        static_cast<double>(sum < 1.0L ? sum : 1.0L);
  }
}

}  // namespace gilbert
