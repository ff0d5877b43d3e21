#include "gilbert/estimators_1d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gilbert/parallel.hpp"

namespace gilbert {

namespace {

void check_lambda_n(const char* op, double lambda, long long n) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument(std::string(op) + ": lambda must be positive");
  }
  if (n < 1) {
    throw std::invalid_argument(std::string(op) + ": n must be >= 1");
  }
}

// Shared tail of both conditional schemes: starting from position z, each
// pass accounts for the no-point-in-reach factor and jumps past the next
// unit-plus-exponential gap.
double conditional_tail(double lambda, double w, double z, RngStream& rng) {
  double p = 1.0;
  while (z <= w) {
    p *= std::exp(-lambda * std::min(w - z, 1.0));
    z += 1.0 + rng.exponential(lambda);
  }
  return p;
}

}  // namespace

EstimateResult crude_mc_few_edges(double lambda, double w, int k, long long n,
                                  std::uint64_t seed, int workers) {
  check_lambda_n("crude_mc_few_edges", lambda, n);
  if (!(w > 0.0)) {
    throw std::invalid_argument("crude_mc_few_edges: w must be positive");
  }
  if (k < 0) {
    throw std::invalid_argument("crude_mc_few_edges: k must be >= 0");
  }
  struct State {
    std::vector<double> recent;
  };
  return run_replicates_timed(
      static_cast<std::uint64_t>(n), seed, workers, [] { return State{}; },
      [=](State& state, RngStream& rng) -> double {
        // Points arrive sorted, so the new edges at x are the buffered points
        // not yet fallen out of [x - 1, x].
        auto& recent = state.recent;
        recent.clear();
        std::size_t left = 0;
        long long edges = 0;
        double x = rng.exponential(lambda);
        while (x <= w) {
          while (left < recent.size() && recent[left] < x - 1.0) ++left;
          edges += static_cast<long long>(recent.size() - left);
          if (edges > k) return 0.0;
          recent.push_back(x);
          x += rng.exponential(lambda);
        }
        return 1.0;
      });
}

EstimateResult cond_mc_no_edges(double lambda, double w, long long n,
                                std::uint64_t seed, int workers) {
  check_lambda_n("cond_mc_no_edges", lambda, n);
  if (!(w >= 1.0)) {
    throw std::invalid_argument("cond_mc_no_edges: requires w >= 1");
  }
  return run_replicates_timed(
      static_cast<std::uint64_t>(n), seed, workers, [] { return 0; },
      [=](int&, RngStream& rng) -> double {
        return conditional_tail(lambda, w, rng.exponential(lambda), rng);
      });
}

EstimateResult cond_mc_at_most_one_edge(double lambda, double w, long long n,
                                        std::uint64_t seed, int workers) {
  check_lambda_n("cond_mc_at_most_one_edge", lambda, n);
  if (!(w >= 1.0)) {
    throw std::invalid_argument("cond_mc_at_most_one_edge: requires w >= 1");
  }
  return run_replicates_timed(
      static_cast<std::uint64_t>(n), seed, workers, [] { return 0; },
      [=](int&, RngStream& rng) -> double {
        // Walk to the first point whose predecessor gap is <= 1, then proceed
        // as in the no-edge scheme from there.
        double z = rng.exponential(lambda);
        double y;
        do {
          y = rng.exponential(lambda);
          z += y;
        } while (y > 1.0);
        return conditional_tail(lambda, w, z, rng);
      });
}

EstimateResult cond_mc_few_edges(double lambda, double w, int k, long long n,
                                 std::uint64_t seed, int workers) {
  if (k == 0) return cond_mc_no_edges(lambda, w, n, seed, workers);
  if (k == 1) return cond_mc_at_most_one_edge(lambda, w, n, seed, workers);
  throw std::invalid_argument(
      "cond_mc_few_edges: conditional estimator supports k = 0 or k = 1 only");
}

}  // namespace gilbert
