#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "gilbert/accumulators.hpp"
#include "gilbert/window.hpp"

namespace gilbert {

// Prefix crossing indices of a point stream: k_below is the smallest prefix
// length whose edge count reaches (1-a)*mu, k_above the largest whose edge
// count still stays at or below (1+a)*mu. Edge counts only grow along the
// stream, so k_below <= k_above + 1.
struct CrossingIndices {
  long long k_below = 0;
  long long k_above = 0;
};

// Writes the next point's coordinates into out[0..dim) and returns true, or
// returns false when the stream is exhausted.
using PointSource = std::function<bool(double*)>;

// Feeds the stream point by point into an incremental edge count until the
// upper threshold is exceeded. max_points <= 0 selects a default cap of 1e7;
// exhaustion or hitting the cap before the crossing is an error.
CrossingIndices crossing_indices(const PointSource& next_point, double mu,
                                 double a, const Window& window,
                                 long long max_points = 0);

// Crude MC for the lower tail: proportion of full Poisson configurations
// whose edge count stays below (1-a)*mu.
EstimateResult crude_mc_lower_tail(double lambda, const Window& window,
                                   double a, double mu, long long n,
                                   std::uint64_t seed, int workers = 1);

// Crude MC for the upper tail: edge count exceeds (1+a)*mu.
EstimateResult crude_mc_upper_tail(double lambda, const Window& window,
                                   double a, double mu, long long n,
                                   std::uint64_t seed, int workers = 1);

// Conditional MC via the Poisson-count conditioning: each replicate extends a
// uniform stream to its lower crossing index K and contributes
// poisson_cdf(K - 1, lambda |W|).
EstimateResult cond_mc_lower_tail(double lambda, const Window& window,
                                  double a, double mu, long long n,
                                  std::uint64_t seed, int workers = 1);

// Upper-tail counterpart: contributes 1 - poisson_cdf(K', lambda |W|) with K'
// the last prefix length whose edge count is still admissible.
EstimateResult cond_mc_upper_tail(double lambda, const Window& window,
                                  double a, double mu, long long n,
                                  std::uint64_t seed, int workers = 1);

// Mean edge count of the full configuration, for calibrating mu. The
// estimate is a count, not a probability.
EstimateResult mu_estimate(double lambda, const Window& window, long long n,
                           std::uint64_t seed, int workers = 1);

struct QuantileRow {
  double alpha = 0.0;
  double q_low = 0.0;
  double q_high = 0.0;
  double rel_low = 0.0;
  double rel_high = 0.0;
  bool low_count_warning = false;
};

struct QuantileTable {
  double mu_hat = 0.0;
  std::vector<QuantileRow> rows;
  long long n_samples = 0;
  double seconds = 0.0;
};

// Empirical nearest-rank quantiles Q_alpha and Q_{1-alpha} of the edge count
// over n crude samples, with deviations relative to the sample mean. Requires
// n >= 1/min(alpha); rows with alpha*n < 10 carry a warning flag.
QuantileTable edge_count_quantiles(double lambda, const Window& window,
                                   const std::vector<double>& alphas,
                                   long long n, std::uint64_t seed,
                                   int workers = 1);

}  // namespace gilbert
