#pragma once

// Minimal fork-join helper. Work items are claimed from a shared counter and
// write to caller-owned, index-addressed slots, so results never depend on
// the schedule.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace scatter {

/// Worker count: SCATTER_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
inline std::size_t worker_count() {
  if (const char* env = std::getenv("SCATTER_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, count). The first exception thrown by any call is
/// rethrown on the calling thread after all workers have joined.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn, std::size_t max_workers = worker_count()) {
  const std::size_t workers = std::min(count, max_workers);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace scatter
