#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace concord {

namespace detail {
inline std::atomic<int>& thread_limit_storage() {
  static std::atomic<int> limit{0};  // 0 = hardware concurrency
  return limit;
}
}  // namespace detail

inline void set_thread_limit(int n) { detail::thread_limit_storage() = n; }

inline int thread_limit() {
  const int n = detail::thread_limit_storage();
  if (n > 0) return n;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, count). Work items must be independent and write
// only to their own output slots, so results do not depend on the worker
// count or interleaving.
inline void parallel_for(std::size_t count,
                         const std::function<void(std::size_t)>& fn) {
  const int workers =
      std::min<int>(thread_limit(), static_cast<int>(count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (std::thread& th : pool) th.join();
}

}  // namespace concord
