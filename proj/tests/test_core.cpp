#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "gilbert/fenwick.hpp"
#include "gilbert/grid.hpp"
#include "gilbert/rng.hpp"
#include "gilbert/window.hpp"

using namespace gilbert;

namespace {

long long brute_edges(const std::vector<std::vector<double>>& pts) {
  long long edges = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < pts[i].size(); ++k) {
        const double diff = pts[i][k] - pts[j][k];
        d2 += diff * diff;
      }
      if (d2 <= 1.0) ++edges;
    }
  }
  return edges;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("count_edges on hand-checked configurations") {
  CHECK(count_edges({{0.2}, {0.5}, {1.8}}) == 1);
  CHECK(count_edges({}) == 0);
  CHECK(count_edges({{0.0, 0.0}, {0.5, 0.0}, {0.0, 0.9}, {3.0, 3.0}}) == 2);
}

TEST_CASE("distance exactly one is an edge") {
  CHECK(count_edges({{0.0, 0.0}, {1.0, 0.0}}) == 1);
  PointConfiguration cfg(Window::box({4.0, 4.0}));
  const double a[2] = {1.0, 1.0};
  const double b[2] = {2.0, 1.0};
  cfg.insert_point({a, 2});
  cfg.insert_point({b, 2});
  CHECK(cfg.edge_count() == 1);
}

TEST_CASE("insert updates the edge count incrementally") {
  PointConfiguration cfg(Window::interval(4.0));
  const double p0 = 0.2, p1 = 1.8, p2 = 0.4;
  cfg.insert_point({&p0, 1});
  cfg.insert_point({&p1, 1});
  CHECK(cfg.edge_count() == 0);
  const int id = cfg.insert_point({&p2, 1});
  CHECK(cfg.edge_count() == 1);
  CHECK(cfg.degree(id) == 1);
  CHECK(cfg.n_alive() == 3);
}

TEST_CASE("remove updates the edge count incrementally") {
  PointConfiguration cfg(Window::box({4.0, 4.0}));
  const double a[2] = {0.0, 0.0};
  const double b[2] = {0.5, 0.0};
  const double c[2] = {0.0, 0.9};
  const double far[2] = {3.0, 3.0};
  const int ia = cfg.insert_point({a, 2});
  cfg.insert_point({b, 2});
  cfg.insert_point({c, 2});
  const int ifar = cfg.insert_point({far, 2});
  CHECK(cfg.edge_count() == 2);
  cfg.remove_point(ifar);
  CHECK(cfg.edge_count() == 2);
  cfg.remove_point(ia);
  CHECK(cfg.edge_count() == 0);
  CHECK(cfg.n_alive() == 2);
}

TEST_CASE("insert then remove restores edge count and degrees") {
  RngStream rng(991, 0);
  PointConfiguration cfg(Window::box({3.0, 3.0}));
  std::vector<int> ids;
  for (int i = 0; i < 25; ++i) {
    const double x[2] = {rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0)};
    ids.push_back(cfg.insert_point({x, 2}));
  }
  const long long edges_before = cfg.edge_count();
  std::vector<int> deg_before;
  for (int id : ids) deg_before.push_back(cfg.degree(id));
  const double x[2] = {1.5, 1.5};
  const int id = cfg.insert_point({x, 2});
  cfg.remove_point(id);
  CHECK(cfg.edge_count() == edges_before);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    CHECK(cfg.degree(ids[i]) == deg_before[i]);
  }
}

TEST_CASE("incremental counts match brute force over random mutations") {
  RngStream rng(20240917, 0);
  for (int s = 0; s < 1000; ++s) {
    const int dim = 1 + s % 3;
    std::vector<double> sides(dim);
    for (int i = 0; i < dim; ++i) sides[i] = rng.uniform(1.5, 5.0);
    const Window win = Window::box(sides);
    PointConfiguration cfg(win);
    std::vector<int> ids;
    std::vector<std::vector<double>> coords;
    for (int m = 0; m < 30; ++m) {
      bool do_insert;
      if (ids.empty()) {
        do_insert = true;
      } else if (cfg.n_alive() >= 50) {
        do_insert = false;
      } else {
        do_insert = rng.next_double() < 0.65;
      }
      if (do_insert) {
        std::vector<double> x(dim);
        for (int i = 0; i < dim; ++i) x[i] = rng.uniform(0.0, sides[i]);
        ids.push_back(cfg.insert_point(x));
        coords.push_back(x);
      } else {
        const std::size_t pick =
            static_cast<std::size_t>(rng.uniform(0.0, 1.0) * ids.size());
        const std::size_t at = std::min(pick, ids.size() - 1);
        cfg.remove_point(ids[at]);
        ids.erase(ids.begin() + at);
        coords.erase(coords.begin() + at);
      }
      REQUIRE(cfg.edge_count() == brute_edges(coords));
      long long degree_sum = 0;
      for (int id : ids) degree_sum += cfg.degree(id);
      REQUIRE(degree_sum == 2 * cfg.edge_count());
      REQUIRE(cfg.n_alive() == static_cast<int>(ids.size()));
    }
  }
}

TEST_CASE("neighbor visits are exact, not a cell superset") {
  RngStream rng(5150, 0);
  PointConfiguration cfg(Window::box({5.0, 5.0}));
  std::vector<int> ids;
  std::vector<std::vector<double>> coords;
  for (int i = 0; i < 40; ++i) {
    std::vector<double> x = {rng.uniform(0.0, 5.0), rng.uniform(0.0, 5.0)};
    ids.push_back(cfg.insert_point(x));
    coords.push_back(x);
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::set<int> visited;
    cfg.for_each_neighbor(coords[i], ids[i],
                          [&](int j) { visited.insert(j); });
    std::set<int> expected;
    for (std::size_t j = 0; j < ids.size(); ++j) {
      if (j == i) continue;
      const double dx = coords[i][0] - coords[j][0];
      const double dy = coords[i][1] - coords[j][1];
      if (dx * dx + dy * dy <= 1.0) expected.insert(ids[j]);
    }
    CHECK(visited == expected);
    CHECK(cfg.degree(ids[i]) == static_cast<int>(expected.size()));
  }
}

TEST_CASE("clear empties the configuration but keeps it usable") {
  PointConfiguration cfg(Window::interval(3.0));
  const double p = 1.0;
  cfg.insert_point({&p, 1});
  cfg.clear();
  CHECK(cfg.n_alive() == 0);
  CHECK(cfg.edge_count() == 0);
  const double q = 2.0;
  const int id = cfg.insert_point({&q, 1});
  CHECK(cfg.n_alive() == 1);
  CHECK(cfg.alive(id));
}

TEST_CASE("point configuration rejects invalid operations") {
  PointConfiguration cfg(Window::interval(2.0));
  const double outside = 2.5;
  CHECK_THROWS_AS(cfg.insert_point({&outside, 1}), std::invalid_argument);
  const double inside = 1.0;
  const int id = cfg.insert_point({&inside, 1});
  cfg.remove_point(id);
  CHECK_THROWS_AS(cfg.remove_point(id), std::invalid_argument);
  CHECK_THROWS_AS(cfg.degree(id + 7), std::invalid_argument);
  const double wrong_dim[2] = {0.5, 0.5};
  CHECK_THROWS_AS(cfg.insert_point({wrong_dim, 2}), std::invalid_argument);
  CHECK_THROWS_AS(PointConfiguration(Window::box(std::vector<double>(9, 2.0))),
                  std::invalid_argument);
}

TEST_CASE("window validation and geometry") {
  CHECK_THROWS_AS(Window({0.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(Window({1.0}, {0.5}), std::invalid_argument);
  const Window w = Window::box({20.0, 20.0});
  CHECK(w.volume() == doctest::Approx(400.0));
  CHECK(w.dim() == 2);
  CHECK(w.side(1) == doctest::Approx(20.0));
}

TEST_CASE("fenwick tree matches a naive prefix-sum oracle") {
  RngStream rng(77, 0);
  const int n = 37;
  std::vector<double> w(n);
  for (double& v : w) v = rng.uniform(0.0, 2.0);
  FenwickTree tree(n);
  tree.build(w);
  auto naive_prefix = [&](int i) {
    double s = 0.0;
    for (int j = 0; j <= i; ++j) s += w[j];
    return s;
  };
  CHECK(tree.prefix(0) == 0.0);
  for (int i = 0; i < n; ++i) {
    CHECK(tree.prefix(i + 1) ==
          doctest::Approx(naive_prefix(i)).epsilon(1e-12));
    CHECK(tree.value(i) == doctest::Approx(w[i]).epsilon(1e-12));
  }
  CHECK(tree.total() == doctest::Approx(naive_prefix(n - 1)).epsilon(1e-12));

  for (int step = 0; step < 200; ++step) {
    const int i = static_cast<int>(rng.uniform(0.0, 1.0) * n) % n;
    const double v = rng.uniform(0.0, 3.0);
    w[i] = v;
    tree.set(i, v);
    const int probe = static_cast<int>(rng.uniform(0.0, 1.0) * n) % n;
    CHECK(tree.prefix(probe + 1) ==
          doctest::Approx(naive_prefix(probe)).epsilon(1e-12));
  }
}

TEST_CASE("fenwick sampling lands in the owning index") {
  const std::vector<double> w = {0.5, 0.0, 2.0, 1.5};
  FenwickTree tree(4);
  tree.build(w);
  CHECK(tree.total() == doctest::Approx(4.0));
  CHECK(tree.sample(0.0) == 0);
  CHECK(tree.sample(0.49) == 0);
  CHECK(tree.sample(0.5) == 2);
  CHECK(tree.sample(2.49) == 2);
  CHECK(tree.sample(2.51) == 3);
  CHECK(tree.sample(3.99) == 3);
  CHECK(tree.sample(4.0) == tree.size());

  FenwickTree ones(16);
  ones.build(std::vector<double>(16, 1.0));
  CHECK(ones.total() == 16.0);
  for (int i = 0; i < 16; ++i) {
    CHECK(ones.sample(i + 0.5) == i);
  }
}

}  // TEST_SUITE
