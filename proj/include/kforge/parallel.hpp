#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace kforge {

// Runs fn(i) for i in [0,n), statically partitioned over `workers`
// threads. The first exception thrown is rethrown after all threads
// join. Callers own determinism: fn(i) writes must be index-disjoint.
inline void parallel_for(std::size_t n, unsigned workers,
                         const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  unsigned t = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  std::size_t chunk = (n + t - 1) / t;
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> threads;
  threads.reserve(t);
  for (unsigned w = 0; w < t; ++w) {
    std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    threads.emplace_back([&, lo, hi]() {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace kforge
