#include <cmath>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "gilbert/estimators_1d.hpp"

using namespace gilbert;

namespace {

// Exact series values for the no-edge probability, frozen against an
// independent arbitrary-precision evaluation.
constexpr double kP0_2_5 = 0.0040829670166394709814;
constexpr double kP0_2_2 = 0.12820947222113926206;
constexpr double kP0_1_4 = 0.19918257291498421069;
constexpr double kP0_2_7_5 = 2.3184398324424548742e-4;
constexpr double kP0_2_1_5 = 0.22404180765538774341;

double zscore(const EstimateResult& r, double reference, double ref_se = 0.0) {
  const double se =
      std::sqrt(r.std_error * r.std_error + ref_se * ref_se);
  return (r.estimate - reference) / se;
}

}  // namespace

TEST_SUITE("estimators_1d") {

TEST_CASE("crude MC reproduces exact no-edge values") {
  const auto r = crude_mc_few_edges(2.0, 5.0, 0, 200000, 11, 1);
  CHECK(std::abs(zscore(r, kP0_2_5)) < 4.0);
  CHECK(r.n_samples == 200000);
  CHECK(r.std_error ==
        doctest::Approx(std::sqrt(r.sample_variance / 200000.0))
            .epsilon(1e-12));

  const auto s = crude_mc_few_edges(2.0, 2.0, 0, 200000, 12, 1);
  CHECK(std::abs(zscore(s, kP0_2_2)) < 4.0);
}

TEST_CASE("crude MC handles windows below the connection radius") {
  // For w < 1 every pair is connected, so no edge means at most one point.
  const double expected = 2.0 * std::exp(-1.0);
  const auto r = crude_mc_few_edges(2.0, 0.5, 0, 200000, 13, 1);
  CHECK(std::abs(zscore(r, expected)) < 4.0);
}

TEST_CASE("crude MC threshold is monotone in k") {
  const auto r1 = crude_mc_few_edges(2.0, 2.0, 1, 100000, 14, 1);
  const auto r5 = crude_mc_few_edges(2.0, 2.0, 5, 100000, 14, 1);
  CHECK(r5.estimate >= r1.estimate);
}

TEST_CASE("crude MC validates arguments") {
  CHECK_THROWS_AS(crude_mc_few_edges(0.0, 5.0, 0, 10, 1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(crude_mc_few_edges(2.0, 0.0, 0, 10, 1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(crude_mc_few_edges(2.0, 5.0, -1, 10, 1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(crude_mc_few_edges(2.0, 5.0, 0, 0, 1, 1),
                  std::invalid_argument);
}

TEST_CASE("conditional no-edge estimator matches the exact series") {
  struct Case {
    double lambda, w, truth;
  };
  const Case cases[] = {
      {2.0, 5.0, kP0_2_5},
      {2.0, 2.0, kP0_2_2},
      {1.0, 4.0, kP0_1_4},
      {2.0, 1.5, kP0_2_1_5},
      {2.0, 7.5, kP0_2_7_5},
  };
  std::uint64_t seed = 21;
  for (const auto& c : cases) {
    const auto r = cond_mc_no_edges(c.lambda, c.w, 100000, seed++, 1);
    CHECK(std::abs(zscore(r, c.truth)) < 4.0);
  }
}

TEST_CASE("conditional estimator is exact in the near-degenerate window") {
  // lambda = 0.1, w = 1.001: frozen quadrature value of the exact integral.
  const auto r = cond_mc_no_edges(0.1, 1.001, 10000, 31, 1);
  CHECK(std::abs(r.estimate - 0.99531211191762800473) < 5e-4);
}

TEST_CASE("conditional replicates live in (0, 1]") {
  int outside = 0;
  int exactly_one = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto r = cond_mc_no_edges(2.0, 2.0, 1, seed, 1);
    if (!(r.estimate > 0.0 && r.estimate <= 1.0)) ++outside;
    if (r.estimate == 1.0) ++exactly_one;
  }
  CHECK(outside == 0);

  // A first interpoint distance beyond w leaves the product untouched, so
  // the replicate equals one exactly; w = 1 makes that common.
  int ones_at_unit_window = 0;
  int below_one = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto r = cond_mc_no_edges(0.1, 1.0, 1, seed, 1);
    if (r.estimate == 1.0) ++ones_at_unit_window;
    if (r.estimate < 1.0) ++below_one;
  }
  CHECK(ones_at_unit_window > 0);
  CHECK(ones_at_unit_window + below_one == 50);
}

TEST_CASE("conditional at-most-one-edge estimator") {
  // Published reference 1.676e-2 (SE 1.28e-4) for lambda = 2, w = 5.
  const auto r = cond_mc_at_most_one_edge(2.0, 5.0, 100000, 41, 1);
  CHECK(std::abs(zscore(r, 1.676e-2, 1.28e-4)) < 4.0);

  const auto p0 = cond_mc_no_edges(2.0, 5.0, 100000, 42, 1);
  CHECK(r.estimate > p0.estimate);

  int outside = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto one = cond_mc_at_most_one_edge(2.0, 2.0, 1, seed, 1);
    if (!(one.estimate > 0.0 && one.estimate <= 1.0)) ++outside;
  }
  CHECK(outside == 0);

  CHECK_THROWS_AS(cond_mc_at_most_one_edge(2.0, 0.9, 10, 1, 1),
                  std::invalid_argument);
}

TEST_CASE("conditioning never increases the variance") {
  struct Case {
    double lambda, w;
    int k;
  };
  const Case cases[] = {
      {2.0, 5.0, 0}, {2.0, 2.0, 0}, {1.0, 4.0, 0}, {2.0, 5.0, 1},
      {2.0, 2.0, 1},
  };
  std::uint64_t seed = 51;
  for (const auto& c : cases) {
    const auto crude = crude_mc_few_edges(c.lambda, c.w, c.k, 100000, seed, 1);
    const EstimateResult cond =
        c.k == 0 ? cond_mc_no_edges(c.lambda, c.w, 100000, seed + 1, 1)
                 : cond_mc_at_most_one_edge(c.lambda, c.w, 100000, seed + 1, 1);
    CHECK(cond.sample_variance < crude.sample_variance);
    // Unbiasedness: the two estimators target the same probability.
    const double comb = std::sqrt(crude.std_error * crude.std_error +
                                  cond.std_error * cond.std_error);
    CHECK(std::abs(crude.estimate - cond.estimate) < 3.0 * comb);
    seed += 2;
  }
}

TEST_CASE("dispatcher forwards k = 0 and k = 1 and rejects larger k") {
  const auto a = cond_mc_few_edges(2.0, 5.0, 0, 20000, 61, 1);
  const auto b = cond_mc_no_edges(2.0, 5.0, 20000, 61, 1);
  CHECK(a.estimate == b.estimate);
  CHECK(a.sample_variance == b.sample_variance);

  const auto c = cond_mc_few_edges(2.0, 5.0, 1, 20000, 62, 1);
  const auto d = cond_mc_at_most_one_edge(2.0, 5.0, 20000, 62, 1);
  CHECK(c.estimate == d.estimate);

  try {
    cond_mc_few_edges(2.0, 5.0, 2, 10, 1, 1);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("k = 0 or k = 1") != std::string::npos);
  }
}

TEST_CASE("worker count never changes the result") {
  const auto w1 = cond_mc_no_edges(2.0, 5.0, 20000, 71, 1);
  const auto w4 = cond_mc_no_edges(2.0, 5.0, 20000, 71, 4);
  const auto w16 = cond_mc_no_edges(2.0, 5.0, 20000, 71, 16);
  CHECK(w1.estimate == w4.estimate);
  CHECK(w1.estimate == w16.estimate);
  CHECK(w1.sample_variance == w4.sample_variance);
  CHECK(w1.sample_variance == w16.sample_variance);
  CHECK(w1.std_error == w16.std_error);

  const auto c1 = crude_mc_few_edges(2.0, 2.0, 1, 20000, 72, 1);
  const auto c16 = crude_mc_few_edges(2.0, 2.0, 1, 20000, 72, 16);
  CHECK(c1.estimate == c16.estimate);
  CHECK(c1.sample_variance == c16.sample_variance);
}

TEST_CASE("conditional estimators validate arguments") {
  CHECK_THROWS_AS(cond_mc_no_edges(2.0, 0.9, 10, 1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(cond_mc_no_edges(0.0, 5.0, 10, 1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(cond_mc_no_edges(2.0, 5.0, 0, 1, 1),
                  std::invalid_argument);
}

}  // TEST_SUITE
