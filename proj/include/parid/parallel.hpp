#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace parid {

/// Runs task(i) for every i in [0, n) on up to `threads` workers. Tasks are
/// claimed in index order; the first exception is rethrown after all workers join.
template <class Task>
void parallel_for(std::size_t n, unsigned threads, Task &&task) {
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back(work);
  }
  if (failure)
    std::rethrow_exception(failure);
}

inline unsigned default_threads() {
  return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace parid
