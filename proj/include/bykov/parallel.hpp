#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bykov {

// Runs body(i) for i in [0, n) on up to `workers` threads. Each index is handled
// exactly once; the first exception is rethrown after all threads join.
template <class Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
  if (n == 0) return;
  const std::size_t w = std::min<std::size_t>(n, workers < 1 ? 1 : static_cast<std::size_t>(workers));
  if (w == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < w; ++t) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace bykov
