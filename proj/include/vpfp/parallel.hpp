#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace vpfp {

/**
 * Runs fn(worker, i) for i in [0, n) on `workers` threads. Work is split in
 * contiguous blocks so each index is handled by exactly one worker; results
 * do not depend on the worker count as long as fn only writes slot i.
 * The first exception thrown by any worker is rethrown on the caller.
 */
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const auto w = static_cast<std::size_t>(std::max(1, workers));
  if (w == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(std::size_t{0}, i);
    return;
  }
  const std::size_t nthreads = std::min(w, n);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t] {
      const std::size_t begin = n * t / nthreads;
      const std::size_t end = n * (t + 1) / nthreads;
      try {
        for (std::size_t i = begin; i < end; ++i) fn(t, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace vpfp
