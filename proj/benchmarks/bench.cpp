#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "gilbert/gilbert.hpp"

using namespace gilbert;

namespace {

const Window kWin10 = Window::box({10.0, 10.0});
constexpr double kMu10 = 575.98519738462529;

// Full build of a typical lambda = 2 configuration on [0, 10]^2 from a
// pre-sampled stream, roughly 200 points and 600 edges.
void BM_InsertPoints(benchmark::State& state) {
  RngStream rng(17, 0);
  const int n = 200;
  const auto pts = sample_uniform_stream(kWin10, n, rng);
  for (auto _ : state) {
    PointConfiguration cfg(kWin10);
    for (int i = 0; i < n; ++i) {
      cfg.insert_point({pts.data() + 2 * i, 2});
    }
    benchmark::DoNotOptimize(cfg.edge_count());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_InsertPoints);

void BM_CondNoEdges1D(benchmark::State& state) {
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const auto r = cond_mc_no_edges(2.0, 7.5, 256, seed++, 1);
    benchmark::DoNotOptimize(r.estimate);
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_CondNoEdges1D);

void BM_CondLowerTail(benchmark::State& state) {
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const auto r = cond_mc_lower_tail(2.0, kWin10, 0.2, kMu10, 4, seed++, 1);
    benchmark::DoNotOptimize(r.estimate);
  }
  state.SetItemsProcessed(state.iterations() * 4);
}
BENCHMARK(BM_CondLowerTail);

void BM_IsLowerTail(benchmark::State& state) {
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const auto r =
        is_lower_tail(2.0, kWin10, 0.2, kMu10, 1.018, 4, seed++, 1);
    benchmark::DoNotOptimize(r.estimate);
  }
  state.SetItemsProcessed(state.iterations() * 4);
}
BENCHMARK(BM_IsLowerTail);

void BM_IsUpperTail(benchmark::State& state) {
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const auto r =
        is_upper_tail(2.0, kWin10, 0.2, kMu10, 1.01, 1.0, 4, seed++, 1);
    benchmark::DoNotOptimize(r.estimate);
  }
  state.SetItemsProcessed(state.iterations() * 4);
}
BENCHMARK(BM_IsUpperTail);

void BM_PoissonCdfOneShot(benchmark::State& state) {
  long long k = 780;
  for (auto _ : state) {
    benchmark::DoNotOptimize(poisson_cdf(k, 800.0));
    if (++k > 820) k = 780;
  }
}
BENCHMARK(BM_PoissonCdfOneShot);

void BM_PoissonCdfTableBuild(benchmark::State& state) {
  for (auto _ : state) {
    PoissonCdfTable table(800.0);
    benchmark::DoNotOptimize(table(800));
  }
}
BENCHMARK(BM_PoissonCdfTableBuild);

void BM_RngPoisson(benchmark::State& state) {
  RngStream rng(17, 0);
  const double mean = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rng.poisson(mean));
  }
}
BENCHMARK(BM_RngPoisson)->Arg(4)->Arg(800);

void BM_FenwickSetSample(benchmark::State& state) {
  const int n = 4096;
  FenwickTree tree(n);
  for (int i = 0; i < n; ++i) tree.set(i, 1.0);
  RngStream rng(17, 0);
  for (auto _ : state) {
    const int i = static_cast<int>(rng.uniform(0.0, n));
    tree.set(i, rng.next_double() + 0.5);
    benchmark::DoNotOptimize(tree.sample(rng.next_double() * tree.total()));
  }
}
BENCHMARK(BM_FenwickSetSample);

}  // namespace

BENCHMARK_MAIN();
