#ifndef KLJN_PARALLEL_HPP_
#define KLJN_PARALLEL_HPP_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kljn {

/// Runs body(i) for i in [0, n) on a small worker pool. Callers write
/// results into pre-sized slots indexed by i, so output order never depends
/// on scheduling. The first exception thrown by any body is rethrown.
template <class Body>
void parallel_for(std::size_t n, Body &&body, unsigned max_threads = 0) {
  unsigned threads = max_threads ? max_threads : std::thread::hardware_concurrency();
  threads = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace kljn

#endif  // KLJN_PARALLEL_HPP_
