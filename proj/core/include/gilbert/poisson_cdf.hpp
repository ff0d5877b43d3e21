#pragma once

#include <vector>

namespace gilbert {

// P(Poisson(mean) <= k), stable for means well beyond 1e4. Summation runs in
// log space from the k-th term outward, so neither e^{-mean} underflow nor
// factorial overflow can occur.
double poisson_cdf(long long k, double mean);

// Tabulated CDF for one fixed mean, built once per estimator run. Arguments
// beyond the table clamp to 1 (the truncated tail is below 1e-12 at the
// default table length); negative arguments yield 0.
class PoissonCdfTable {
 public:
  explicit PoissonCdfTable(double mean, long long k_max = -1);

  double operator()(long long k) const {
    if (k < 0) return 0.0;
    if (k >= static_cast<long long>(cdf_.size())) return 1.0;
    return cdf_[static_cast<std::size_t>(k)];
  }

  double mean() const { return mean_; }
  long long k_max() const { return static_cast<long long>(cdf_.size()) - 1; }

 private:
  double mean_;
  std::vector<double> cdf_;
};

}  // namespace gilbert
