#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

namespace rwrs {

/// Worker count from RWRS_WORKERS, falling back to hardware_concurrency (at least 1).
std::size_t default_workers();

/// Evaluates fn(i) for i in [0, count) on up to `workers` threads and returns
/// the results in index order. Results never depend on the worker count as
/// long as fn(i) is a pure function of i. If several calls throw, the
/// exception of the smallest index is rethrown.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, std::size_t workers, Fn&& fn) {
  std::vector<T> out(count);
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = std::numeric_limits<std::size_t>::max();
  std::exception_ptr error;

  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };

  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace rwrs
