#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "gilbert/estimators_nd.hpp"
#include "gilbert/rng.hpp"
#include "gilbert/window.hpp"

using namespace gilbert;

namespace {

PointSource vector_source(std::vector<std::vector<double>> pts) {
  auto state = std::make_shared<std::pair<std::vector<std::vector<double>>,
                                          std::size_t>>(std::move(pts), 0);
  return [state](double* out) {
    if (state->second >= state->first.size()) return false;
    const auto& p = state->first[state->second++];
    std::copy(p.begin(), p.end(), out);
    return true;
  };
}

std::vector<std::vector<double>> collinear_points(double spacing, double w) {
  std::vector<std::vector<double>> pts;
  for (double x = 0.0; x <= w; x += spacing) pts.push_back({x});
  return pts;
}

double combined_se(const EstimateResult& a, const EstimateResult& b) {
  return std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
}

// Exact mean edge count over [0, w] in one dimension, w >= 1.
double exact_mu_1d(double lambda, double w) {
  return lambda * lambda * (2.0 * w - 1.0) / 2.0;
}

}  // namespace

TEST_SUITE("estimators_nd") {

TEST_CASE("crossing indices on a deterministic collinear stream") {
  // Points at 0, 0.5, 1, ...: after k points the edge count is
  // 0, 1, 3, 5, 7, ... (from the third point on, each links to the
  // previous two).
  const Window win = Window::interval(10.0);
  const auto idx =
      crossing_indices(vector_source(collinear_points(0.5, 10.0)), 3.0, 0.0,
                       win);
  CHECK(idx.k_below == 3);
  CHECK(idx.k_above == 3);
}

TEST_CASE("crossing indices at the degenerate lower threshold") {
  // a = 1 makes the lower target zero, which every prefix satisfies, so the
  // smallest admissible index is 1. The upper crossing of (1+a)mu = 6 happens
  // at the fifth point (edge count 7), leaving k_above = 4.
  const Window win = Window::interval(10.0);
  const auto idx =
      crossing_indices(vector_source(collinear_points(0.5, 10.0)), 3.0, 1.0,
                       win);
  CHECK(idx.k_below == 1);
  CHECK(idx.k_above == 4);
}

TEST_CASE("crossing index pair stays consistent on random streams") {
  const Window win = Window::box({4.0, 4.0});
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto rng = std::make_shared<RngStream>(seed, 900);
    PointSource src = [rng, &win](double* out) {
      out[0] = rng->uniform(0.0, 4.0);
      out[1] = rng->uniform(0.0, 4.0);
      return true;
    };
    const auto idx = crossing_indices(src, 30.0, 0.3, win);
    CHECK(idx.k_below >= 1);
    CHECK(idx.k_below <= idx.k_above + 1);
  }
}

TEST_CASE("points beyond the consumed prefix never matter") {
  RngStream rng(424242, 0);
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 400; ++i) {
    pts.push_back({rng.uniform(0.0, 5.0), rng.uniform(0.0, 5.0)});
  }
  const Window win = Window::box({5.0, 5.0});
  const auto base = crossing_indices(vector_source(pts), 40.0, 0.2, win);
  // The stream is read up to the upper crossing, i.e. k_above + 1 points.
  const auto consumed =
      static_cast<std::ptrdiff_t>(std::max(base.k_below, base.k_above)) + 1;
  REQUIRE(consumed < static_cast<std::ptrdiff_t>(pts.size()));

  auto shuffled = pts;
  std::mt19937 gen(7);
  std::shuffle(shuffled.begin() + consumed, shuffled.end(), gen);
  CHECK(shuffled != pts);
  const auto again = crossing_indices(vector_source(shuffled), 40.0, 0.2, win);
  CHECK(again.k_below == base.k_below);
  CHECK(again.k_above == base.k_above);
}

TEST_CASE("crossing indices error paths") {
  const Window win = Window::interval(10000.0);
  auto counter = std::make_shared<long long>(0);
  PointSource sparse = [counter](double* out) {
    out[0] = 2.0 * static_cast<double>((*counter)++);
    return *counter <= 4000;
  };
  CHECK_THROWS_AS(crossing_indices(sparse, 10.0, 0.5, win, 1000),
                  std::runtime_error);

  CHECK_THROWS_AS(
      crossing_indices(vector_source(collinear_points(2.0, 100.0)), 10.0, 0.5,
                       Window::interval(100.0)),
      std::runtime_error);

  CHECK_THROWS_AS(
      crossing_indices(vector_source(collinear_points(0.5, 10.0)), 0.0, 0.2,
                       Window::interval(10.0)),
      std::invalid_argument);
  CHECK_THROWS_AS(
      crossing_indices(vector_source(collinear_points(0.5, 10.0)), 3.0, -0.1,
                       Window::interval(10.0)),
      std::invalid_argument);
}

TEST_CASE("mu estimate agrees with the exact mean") {
  const auto r = mu_estimate(1.0, Window::interval(3.0), 100000, 81, 1);
  CHECK(std::abs(r.estimate - exact_mu_1d(1.0, 3.0)) < 4.0 * r.std_error);

  // 2D 4 x 5 box: lambda^2 / 2 * (pi a b - 4/3 (a + b) + 1/2).
  const double kPi = 3.14159265358979323846;
  const double exact = 2.0 * (kPi * 20.0 - 4.0 / 3.0 * 9.0 + 0.5);
  const auto s = mu_estimate(2.0, Window::box({4.0, 5.0}), 40000, 82, 1);
  CHECK(std::abs(s.estimate - exact) < 4.0 * s.std_error);
}

TEST_CASE("conditional tails match crude tails on small instances") {
  struct Instance {
    double lambda;
    Window window;
    double a;
  };
  const Instance instances[] = {
      {1.0, Window::interval(3.0), 0.5},
      {2.0, Window::box({2.0, 2.0}), 0.3},
      {1.5, Window::box({2.5, 2.5}), 0.4},
  };
  std::uint64_t seed = 91;
  for (const auto& inst : instances) {
    const double mu =
        mu_estimate(inst.lambda, inst.window, 40000, seed++, 1).estimate;

    const auto crude_lo =
        crude_mc_lower_tail(inst.lambda, inst.window, inst.a, mu, 40000,
                            seed, 1);
    const auto cond_lo =
        cond_mc_lower_tail(inst.lambda, inst.window, inst.a, mu, 40000,
                           seed + 1, 1);
    CHECK(std::abs(crude_lo.estimate - cond_lo.estimate) <
          3.0 * combined_se(crude_lo, cond_lo));
    CHECK(cond_lo.sample_variance < crude_lo.sample_variance);

    const auto crude_hi =
        crude_mc_upper_tail(inst.lambda, inst.window, inst.a, mu, 40000,
                            seed + 2, 1);
    const auto cond_hi =
        cond_mc_upper_tail(inst.lambda, inst.window, inst.a, mu, 40000,
                           seed + 3, 1);
    CHECK(std::abs(crude_hi.estimate - cond_hi.estimate) <
          3.0 * combined_se(crude_hi, cond_hi));
    CHECK(cond_hi.sample_variance < crude_hi.sample_variance);
    seed += 4;
  }
}

TEST_CASE("quantile table structure and median behavior") {
  const Window win = Window::box({10.0, 10.0});
  const auto table =
      edge_count_quantiles(2.0, win, {0.5, 0.05, 0.01}, 20000, 101, 1);
  REQUIRE(table.rows.size() == 3);
  CHECK(table.n_samples == 20000);

  const auto& median = table.rows[0];
  CHECK(median.alpha == 0.5);
  CHECK(median.q_low == median.q_high);
  CHECK(std::abs(median.rel_low) < 0.01);
  CHECK(std::abs(median.rel_high) < 0.01);
  CHECK_FALSE(median.low_count_warning);

  for (const auto& row : table.rows) {
    CHECK(row.q_low <= row.q_high);
    CHECK(row.rel_low <= row.rel_high);
    CHECK(row.q_low <= table.mu_hat * (1.0 + row.rel_high));
  }
  CHECK(table.rows[1].q_low >= table.rows[2].q_low);
  CHECK(table.rows[1].q_high <= table.rows[2].q_high);
}

TEST_CASE("quantile warnings and sample-size validation") {
  const Window win = Window::box({3.0, 3.0});
  const auto table =
      edge_count_quantiles(2.0, win, {0.01, 0.0004}, 20000, 111, 1);
  REQUIRE(table.rows.size() == 2);
  CHECK_FALSE(table.rows[0].low_count_warning);
  CHECK(table.rows[1].low_count_warning);

  CHECK_THROWS_AS(edge_count_quantiles(2.0, win, {0.001}, 999, 1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(edge_count_quantiles(2.0, win, {}, 1000, 1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(edge_count_quantiles(2.0, win, {0.6}, 1000, 1, 1),
                  std::invalid_argument);
}

TEST_CASE("tail estimators validate arguments") {
  const Window win = Window::box({3.0, 3.0});
  CHECK_THROWS_AS(cond_mc_lower_tail(2.0, win, 0.0, 10.0, 100, 1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(cond_mc_lower_tail(2.0, win, 1.0, 10.0, 100, 1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(cond_mc_upper_tail(2.0, win, 0.2, 0.0, 100, 1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(crude_mc_lower_tail(0.0, win, 0.2, 10.0, 100, 1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(mu_estimate(2.0, win, 0, 1, 1), std::invalid_argument);
}

TEST_CASE("worker count never changes nd results") {
  const Window win = Window::box({3.0, 3.0});
  const auto w1 = cond_mc_lower_tail(2.0, win, 0.3, 15.0, 10000, 121, 1);
  const auto w4 = cond_mc_lower_tail(2.0, win, 0.3, 15.0, 10000, 121, 4);
  const auto w16 = cond_mc_lower_tail(2.0, win, 0.3, 15.0, 10000, 121, 16);
  CHECK(w1.estimate == w4.estimate);
  CHECK(w1.estimate == w16.estimate);
  CHECK(w1.sample_variance == w16.sample_variance);

  const auto q1 = edge_count_quantiles(2.0, win, {0.1}, 5000, 122, 1);
  const auto q16 = edge_count_quantiles(2.0, win, {0.1}, 5000, 122, 16);
  CHECK(q1.mu_hat == q16.mu_hat);
  CHECK(q1.rows[0].q_low == q16.rows[0].q_low);
  CHECK(q1.rows[0].q_high == q16.rows[0].q_high);
}

}  // TEST_SUITE
