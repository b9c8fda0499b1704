#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace irrsio {

/// Resolve the worker count: explicit request > IRRSIO_THREADS env > hardware.
int resolve_threads(int requested = 0);

/// Runs fn(i) for i in [0, n) over `threads` workers on contiguous chunks.
/// Each index is processed by exactly one worker and writes only its own
/// output slot, so results do not depend on the thread count.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (n == 0) return;
  std::size_t nthreads = threads > 0 ? static_cast<std::size_t>(threads) : 1;
  if (nthreads > n) nthreads = n;
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  const std::size_t chunk = (n + nthreads - 1) / nthreads;
  for (std::size_t t = 0; t < nthreads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = begin + chunk < n ? begin + chunk : n;
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace irrsio
