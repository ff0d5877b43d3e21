#pragma once

#include <cstdint>

#include "gilbert/accumulators.hpp"

namespace gilbert {

// Proportion of n fresh Poisson samples on [0, w] whose unit-distance graph
// has at most k edges. Replicate i draws from RNG stream i of the seed, so
// results are bit-identical for any worker count.
EstimateResult crude_mc_few_edges(double lambda, double w, int k, long long n,
                                  std::uint64_t seed, int workers = 1);

// Conditional MC for the no-edge probability on [0, w], w >= 1. Every
// replicate value lies in (0, 1].
EstimateResult cond_mc_no_edges(double lambda, double w, long long n,
                                std::uint64_t seed, int workers = 1);

// Conditional MC for the at-most-one-edge probability on [0, w], w >= 1.
EstimateResult cond_mc_at_most_one_edge(double lambda, double w, long long n,
                                        std::uint64_t seed, int workers = 1);

// Dispatches on k; only k = 0 and k = 1 have conditional schemes.
EstimateResult cond_mc_few_edges(double lambda, double w, int k, long long n,
                                 std::uint64_t seed, int workers = 1);

}  // namespace gilbert
