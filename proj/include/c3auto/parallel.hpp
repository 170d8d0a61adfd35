#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace c3auto {

// Runs body(i) for i in [0, n) on `threads` workers. Worker w owns the
// contiguous block [w*n/threads, (w+1)*n/threads), so the assignment of
// indices to workers depends only on n and the thread count.
inline void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, n));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<size_t>(threads));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    const int lo = static_cast<int>(static_cast<long long>(n) * w / threads);
    const int hi = static_cast<int>(static_cast<long long>(n) * (w + 1) / threads);
    pool.emplace_back([&, w, lo, hi]() {
      try {
        for (int i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[static_cast<size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace c3auto
