#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gilbert/accumulators.hpp"
#include "gilbert/fenwick.hpp"
#include "gilbert/grid.hpp"
#include "gilbert/rng.hpp"
#include "gilbert/window.hpp"

namespace gilbert {

// Running log-likelihood ratio log(dP/dQ) of a tilted trajectory. Kept in log
// space; under gamma = 1 every update adds an exact 0.0.
struct LikelihoodWeight {
  double log_rho = 0.0;

  double rho() const;
};

// Degree-proportional removal from a PointConfiguration: each call removes
// one point with probability gamma^deg / sum(gamma^deg) and accrues the
// likelihood-ratio factor against uniform removal. Weights live in a Fenwick
// tree; updates are exact deltas, so gamma = 1 keeps every weight at exactly
// 1.0 and the log ratio at exactly 0.0.
class ThinningSampler {
 public:
  ThinningSampler(PointConfiguration& cfg, double gamma);

  void remove_one(RngStream& rng);

  const LikelihoodWeight& weight() const { return lw_; }
  double total_weight() const { return weights_.total(); }

 private:
  double pow_gamma(int d);

  PointConfiguration& cfg_;
  double gamma_;
  FenwickTree weights_;
  std::vector<double> pow_;
  std::vector<int> scratch_;
  LikelihoodWeight lw_;
};

// Birth proposal over a grid of equal bins: bin b is chosen with probability
// proportional to gamma^{n(b)}, where n(b) counts the points in b and all
// adjacent bins, and the location is uniform within the chosen bin. Bin
// weights are refreshed after every accepted point (only the 3^d block around
// it changes).
class BirthGrid {
 public:
  // bin_side must divide every window side up to rounding.
  BirthGrid(const Window& window, double bin_side, double gamma);

  void reset();

  // Tallies an accepted point (from any source) into the occupancy counts.
  void add_point(std::span<const double> x);

  // Samples a birth location into out[0..dim), accruing the likelihood-ratio
  // factor against a uniform birth, and tallies the new point.
  void birth(RngStream& rng, double* out);

  long long n_at(std::span<const double> x) const;
  double bin_mass(std::size_t b) const;
  std::size_t nbins() const { return nsum_.size(); }
  int dim() const { return dim_; }

  const LikelihoodWeight& weight() const { return lw_; }

 private:
  std::size_t bin_of(std::span<const double> x) const;
  double pow_gamma(long long d);
  template <class Fn>
  void for_each_block_bin(std::size_t center, Fn&& fn) const;

  Window window_;
  int dim_;
  double gamma_;
  double log_gamma_;
  double log_nbins_;
  int nbins_axis_[PointConfiguration::kMaxDim] = {};
  double scale_[PointConfiguration::kMaxDim] = {};
  std::vector<int> occ_;
  std::vector<long long> nsum_;
  std::vector<double> ones_;
  FenwickTree weights_;
  std::vector<double> pow_;
  LikelihoodWeight lw_;
};

// Lower-tail importance sampling: thin an initial floor(lambda |W|)-point
// uniform configuration by degree-proportional removals until the edge count
// first drops below (1-a)*mu, then weight the Poisson-count conditioning
// value by the accumulated likelihood ratio. gamma = 1 reduces to uniform
// removals with weight exactly 1.
EstimateResult is_lower_tail(double lambda, const Window& window, double a,
                             double mu, double gamma, long long n,
                             std::uint64_t seed, int workers = 1);

// Upper-tail importance sampling: grow the configuration from scratch by
// births from the BirthGrid proposal until the edge count first exceeds
// (1+a)*mu. Early births are near uniform; the clustering tilt strengthens
// as occupancy accumulates.
EstimateResult is_upper_tail(double lambda, const Window& window, double a,
                             double mu, double gamma, double bin_side,
                             long long n, std::uint64_t seed, int workers = 1);

enum class Tail { lower, upper };

struct PilotRow {
  double gamma = 1.0;
  EstimateResult result;
};

struct PilotResult {
  double gamma_star = 1.0;
  double mu_used = 0.0;
  std::vector<PilotRow> rows;
};

// Runs the matching IS estimator at every candidate gamma with shared seeds
// and returns the variance-minimizing candidate plus the full table. mu is
// estimated internally from a derived seed. Deterministic for a fixed seed.
PilotResult pilot_tune_gamma(double lambda, const Window& window, double a,
                             Tail tail, const std::vector<double>& candidates,
                             long long n_pilot, std::uint64_t seed,
                             int workers = 1);

}  // namespace gilbert
