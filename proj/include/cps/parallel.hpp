#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace cps {

// Runs fn(i) for i in [0, n) across up to `threads` workers in contiguous
// blocks. Determinism is the caller's contract: fn(i) may only write to its
// own preallocated slot, and any reduction happens afterwards in index order.
// The first exception thrown by any worker is rethrown on the calling thread.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }

  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto guarded = [&](int lo, int hi) {
    try {
      for (int i = lo; i < hi; ++i) {
        {
          std::scoped_lock lock(err_mutex);
          if (first_error) return;  // another worker already failed
        }
        fn(i);
      }
    } catch (...) {
      std::scoped_lock lock(err_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  std::vector<std::thread> pool;
  const int chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int lo = w * chunk;
    const int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(guarded, lo, hi);
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace cps
