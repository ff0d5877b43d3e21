#include "gilbert/estimators_nd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "gilbert/grid.hpp"
#include "gilbert/parallel.hpp"
#include "gilbert/poisson_cdf.hpp"

namespace gilbert {

namespace {

void check_tail_args(const char* op, double lambda, double a, double mu,
                     long long n) {
  const std::string name(op);
  if (!(lambda > 0.0)) {
    throw std::invalid_argument(name + ": lambda must be positive");
  }
  if (!(a > 0.0 && a < 1.0)) {
    throw std::invalid_argument(name + ": a must be in (0, 1)");
  }
  if (!(mu > 0.0)) {
    throw std::invalid_argument(name + ": mu must be positive");
  }
  if (n < 1) {
    throw std::invalid_argument(name + ": n must be >= 1");
  }
}

void draw_uniform(const Window& window, RngStream& rng, double* out) {
  for (int j = 0; j < window.dim(); ++j) {
    out[j] = rng.uniform(window.lower[j], window.upper[j]);
  }
}

// Inserts uniform points until the edge count reaches threshold; returns the
// number of points present at the crossing.
long long extend_to_threshold(PointConfiguration& cfg, const Window& window,
                              double threshold, long long cap, RngStream& rng,
                              const char* op) {
  double x[PointConfiguration::kMaxDim];
  long long count = cfg.n_alive();
  while (static_cast<double>(cfg.edge_count()) < threshold) {
    if (count >= cap) {
      throw std::runtime_error(std::string(op) +
                               ": point cap exceeded before crossing");
    }
    draw_uniform(window, rng, x);
    cfg.insert_point({x, static_cast<std::size_t>(window.dim())});
    ++count;
  }
  return count;
}

long long replicate_cap(double lambda, const Window& window) {
  return static_cast<long long>(100.0 * lambda * window.volume()) + 1000;
}

}  // namespace

CrossingIndices crossing_indices(const PointSource& next_point, double mu,
                                 double a, const Window& window,
                                 long long max_points) {
  if (!(mu > 0.0)) {
    throw std::invalid_argument("crossing_indices: mu must be positive");
  }
  if (!(a >= 0.0 && a <= 1.0)) {
    throw std::invalid_argument("crossing_indices: a must be in [0, 1]");
  }
  if (max_points <= 0) max_points = 10'000'000;
  const double lo = (1.0 - a) * mu;
  const double hi = (1.0 + a) * mu;
  PointConfiguration cfg(window);
  double x[PointConfiguration::kMaxDim];
  CrossingIndices out;
  long long count = 0;
  for (;;) {
    if (count >= max_points) {
      throw std::runtime_error(
          "crossing_indices: point cap exceeded before crossing (cap = " +
          std::to_string(max_points) + ")");
    }
    if (!next_point(x)) {
      throw std::runtime_error(
          "crossing_indices: point stream exhausted before crossing");
    }
    cfg.insert_point({x, static_cast<std::size_t>(window.dim())});
    ++count;
    const double edges = static_cast<double>(cfg.edge_count());
    if (out.k_below == 0 && edges >= lo) out.k_below = count;
    if (edges > hi) {
      out.k_above = count - 1;
      return out;
    }
  }
}

EstimateResult crude_mc_lower_tail(double lambda, const Window& window,
                                   double a, double mu, long long n,
                                   std::uint64_t seed, int workers) {
  check_tail_args("crude_mc_lower_tail", lambda, a, mu, n);
  const double rate = lambda * window.volume();
  const double lo = (1.0 - a) * mu;
  return run_replicates_timed(
      static_cast<std::uint64_t>(n), seed, workers,
      [&] { return PointConfiguration(window); },
      [&window, rate, lo](PointConfiguration& cfg, RngStream& rng) -> double {
        cfg.clear();
        const long long m = rng.poisson(rate);
        double x[PointConfiguration::kMaxDim];
        for (long long i = 0; i < m; ++i) {
          draw_uniform(window, rng, x);
          cfg.insert_point({x, static_cast<std::size_t>(window.dim())});
          if (static_cast<double>(cfg.edge_count()) >= lo) return 0.0;
        }
        return 1.0;
      });
}

EstimateResult crude_mc_upper_tail(double lambda, const Window& window,
                                   double a, double mu, long long n,
                                   std::uint64_t seed, int workers) {
  check_tail_args("crude_mc_upper_tail", lambda, a, mu, n);
  const double rate = lambda * window.volume();
  const double hi = (1.0 + a) * mu;
  return run_replicates_timed(
      static_cast<std::uint64_t>(n), seed, workers,
      [&] { return PointConfiguration(window); },
      [&window, rate, hi](PointConfiguration& cfg, RngStream& rng) -> double {
        cfg.clear();
        const long long m = rng.poisson(rate);
        double x[PointConfiguration::kMaxDim];
        for (long long i = 0; i < m; ++i) {
          draw_uniform(window, rng, x);
          cfg.insert_point({x, static_cast<std::size_t>(window.dim())});
          if (static_cast<double>(cfg.edge_count()) > hi) return 1.0;
        }
        return 0.0;
      });
}

EstimateResult cond_mc_lower_tail(double lambda, const Window& window,
                                  double a, double mu, long long n,
                                  std::uint64_t seed, int workers) {
  check_tail_args("cond_mc_lower_tail", lambda, a, mu, n);
  const double rate = lambda * window.volume();
  const double lo = (1.0 - a) * mu;
  const long long cap = replicate_cap(lambda, window);
  struct State {
    PointConfiguration cfg;
    PoissonCdfTable table;
  };
  return run_replicates_timed(
      static_cast<std::uint64_t>(n), seed, workers,
      [&] { return State{PointConfiguration(window), PoissonCdfTable(rate)}; },
      [&window, lo, cap](State& state, RngStream& rng) -> double {
        state.cfg.clear();
        const long long k = extend_to_threshold(state.cfg, window, lo, cap,
                                                rng, "cond_mc_lower_tail");
        return state.table(k - 1);
      });
}

EstimateResult cond_mc_upper_tail(double lambda, const Window& window,
                                  double a, double mu, long long n,
                                  std::uint64_t seed, int workers) {
  check_tail_args("cond_mc_upper_tail", lambda, a, mu, n);
  const double rate = lambda * window.volume();
  const double hi = (1.0 + a) * mu;
  const long long cap = replicate_cap(lambda, window);
  struct State {
    PointConfiguration cfg;
    PoissonCdfTable table;
  };
  return run_replicates_timed(
      static_cast<std::uint64_t>(n), seed, workers,
      [&] { return State{PointConfiguration(window), PoissonCdfTable(rate)}; },
      [&window, hi, cap](State& state, RngStream& rng) -> double {
        state.cfg.clear();
        // Extend just past the admissible region: the crossing point k makes
        // k - 1 the last prefix length with an admissible edge count.
        const long long k =
            extend_to_threshold(state.cfg, window, std::nextafter(hi, 1e300),
                                cap, rng, "cond_mc_upper_tail");
        return 1.0 - state.table(k - 1);
      });
}

EstimateResult mu_estimate(double lambda, const Window& window, long long n,
                           std::uint64_t seed, int workers) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("mu_estimate: lambda must be positive");
  }
  if (n < 1) {
    throw std::invalid_argument("mu_estimate: n must be >= 1");
  }
  const double rate = lambda * window.volume();
  return run_replicates_timed(
      static_cast<std::uint64_t>(n), seed, workers,
      [&] { return PointConfiguration(window); },
      [&window, rate](PointConfiguration& cfg, RngStream& rng) -> double {
        cfg.clear();
        const long long m = rng.poisson(rate);
        double x[PointConfiguration::kMaxDim];
        for (long long i = 0; i < m; ++i) {
          draw_uniform(window, rng, x);
          cfg.insert_point({x, static_cast<std::size_t>(window.dim())});
        }
        return static_cast<double>(cfg.edge_count());
      });
}

QuantileTable edge_count_quantiles(double lambda, const Window& window,
                                   const std::vector<double>& alphas,
                                   long long n, std::uint64_t seed,
                                   int workers) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("edge_count_quantiles: lambda must be positive");
  }
  if (alphas.empty()) {
    throw std::invalid_argument("edge_count_quantiles: alphas must be non-empty");
  }
  double min_alpha = 1.0;
  for (const double alpha : alphas) {
    if (!(alpha > 0.0 && alpha <= 0.5)) {
      throw std::invalid_argument(
          "edge_count_quantiles: each alpha must lie in (0, 0.5]");
    }
    min_alpha = std::min(min_alpha, alpha);
  }
  if (static_cast<double>(n) < 1.0 / min_alpha) {
    throw std::invalid_argument(
        "edge_count_quantiles: n must be at least 1/min(alpha)");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const double rate = lambda * window.volume();
  std::vector<double> counts(static_cast<std::size_t>(n));
  run_indexed(
      static_cast<std::uint64_t>(n), seed, workers,
      [&] { return PointConfiguration(window); },
      [&window, rate, &counts](PointConfiguration& cfg, RngStream& rng,
                               std::uint64_t i) {
        cfg.clear();
        const long long m = rng.poisson(rate);
        double x[PointConfiguration::kMaxDim];
        for (long long j = 0; j < m; ++j) {
          draw_uniform(window, rng, x);
          cfg.insert_point({x, static_cast<std::size_t>(window.dim())});
        }
        counts[i] = static_cast<double>(cfg.edge_count());
      });
  QuantileTable out;
  out.mu_hat = std::accumulate(counts.begin(), counts.end(), 0.0) /
               static_cast<double>(n);
  std::sort(counts.begin(), counts.end());
  const auto nearest_rank = [&](double p) {
    const auto rank = static_cast<long long>(
        std::ceil(p * static_cast<double>(n)));
    return counts[static_cast<std::size_t>(std::clamp(rank, 1LL, n) - 1)];
  };
  for (const double alpha : alphas) {
    QuantileRow row;
    row.alpha = alpha;
    row.q_low = nearest_rank(alpha);
    row.q_high = nearest_rank(1.0 - alpha);
    row.rel_low = (row.q_low - out.mu_hat) / out.mu_hat;
    row.rel_high = (row.q_high - out.mu_hat) / out.mu_hat;
    row.low_count_warning = alpha * static_cast<double>(n) < 10.0;
    out.rows.push_back(row);
  }
  out.n_samples = n;
  const std::chrono::duration<double> dt =
      std::chrono::steady_clock::now() - t0;
  out.seconds = dt.count();
  return out;
}

}  // namespace gilbert
