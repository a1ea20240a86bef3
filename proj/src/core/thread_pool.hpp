// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DETFUN_CORE_THREAD_POOL_HPP
#define DETFUN_CORE_THREAD_POOL_HPP

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace detfun {

// Run fn(i) for i in [0, n) across up to `workers` threads. Callers write
// results into preallocated slots by index, so reductions stay
// deterministic regardless of scheduling. The first exception wins and is
// rethrown on the calling thread.
inline void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (workers <= 1 || n == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto body = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  const int count = std::min(workers, n);
  threads.reserve(count);
  for (int t = 0; t < count; ++t) threads.emplace_back(body);
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detfun

#endif
