#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "gilbert/accumulators.hpp"
#include "gilbert/rng.hpp"

namespace gilbert {

// Deterministic replicate driver. Replicate i always consumes RNG stream
// (stream_offset + i) of the experiment seed; replicates are processed in
// fixed-size chunks claimed from an atomic counter, and per-chunk results are
// combined in chunk order afterwards, so the output is identical for any
// worker count.
inline constexpr std::uint64_t kReplicateChunk = 4096;

namespace detail {

template <class MakeState, class ChunkFn>
void dispatch_chunks(std::uint64_t nchunks, int workers, MakeState&& make_state,
                     ChunkFn&& chunk_fn) {
  if (workers <= 1 || nchunks <= 1) {
    auto state = make_state();
    for (std::uint64_t c = 0; c < nchunks; ++c) chunk_fn(state, c);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    try {
      auto state = make_state();
      for (;;) {
        const std::uint64_t c = next.fetch_add(1);
        if (c >= nchunks || failed.load(std::memory_order_relaxed)) break;
        chunk_fn(state, c);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
      failed.store(true);
    }
  };
  const std::uint64_t nthreads =
      std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), nchunks);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::uint64_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

// replicate(state, rng) -> double; state is created once per worker.
template <class MakeState, class Replicate>
RunningStats run_replicates(std::uint64_t n, std::uint64_t seed, int workers,
                            MakeState&& make_state, Replicate&& replicate,
                            std::uint64_t stream_offset = 0) {
  const std::uint64_t nchunks = (n + kReplicateChunk - 1) / kReplicateChunk;
  std::vector<RunningStats> partial(nchunks);
  detail::dispatch_chunks(
      nchunks, workers, std::forward<MakeState>(make_state),
      [&](auto& state, std::uint64_t c) {
        const std::uint64_t begin = c * kReplicateChunk;
        const std::uint64_t end = std::min(n, begin + kReplicateChunk);
        RunningStats acc;
        for (std::uint64_t i = begin; i < end; ++i) {
          RngStream rng(seed, stream_offset + i);
          acc.push(replicate(state, rng));
        }
        partial[c] = acc;
      });
  RunningStats out;
  for (const auto& p : partial) out.merge(p);
  return out;
}

// run_replicates plus wall-clock timing, packaged as an EstimateResult.
template <class MakeState, class Replicate>
EstimateResult run_replicates_timed(std::uint64_t n, std::uint64_t seed,
                                    int workers, MakeState&& make_state,
                                    Replicate&& replicate,
                                    std::uint64_t stream_offset = 0) {
  const auto t0 = std::chrono::steady_clock::now();
  RunningStats stats = run_replicates(
      n, seed, workers, std::forward<MakeState>(make_state),
      std::forward<Replicate>(replicate), stream_offset);
  const std::chrono::duration<double> dt =
      std::chrono::steady_clock::now() - t0;
  return to_result(stats, dt.count());
}

// fill(state, rng, i) writes replicate i's output into caller-owned storage
// indexed by i; deterministic for any worker count by construction.
template <class MakeState, class Fill>
void run_indexed(std::uint64_t n, std::uint64_t seed, int workers,
                 MakeState&& make_state, Fill&& fill,
                 std::uint64_t stream_offset = 0) {
  const std::uint64_t nchunks = (n + kReplicateChunk - 1) / kReplicateChunk;
  detail::dispatch_chunks(nchunks, workers, std::forward<MakeState>(make_state),
                          [&](auto& state, std::uint64_t c) {
                            const std::uint64_t begin = c * kReplicateChunk;
                            const std::uint64_t end =
                                std::min(n, begin + kReplicateChunk);
                            for (std::uint64_t i = begin; i < end; ++i) {
                              RngStream rng(seed, stream_offset + i);
                              fill(state, rng, i);
                            }
                          });
}

}  // namespace gilbert
