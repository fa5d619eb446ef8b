#ifndef PEERLOC_PARALLEL_HPP
#define PEERLOC_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace peerloc {

/// Run fn(0..n-1) across the given number of worker threads. Results must be
/// written to per-index slots; scheduling order is unspecified, so the body
/// must not depend on execution order (all peerloc randomness is keyed by
/// index, never by arrival). The first exception thrown by any body is
/// rethrown after all workers finish.
inline void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (workers <= 1 || n == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  const int count = std::min(workers, n);
  threads.reserve(count);
  for (int w = 0; w < count; ++w) threads.emplace_back(body);
  for (std::thread& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace peerloc

#endif  // PEERLOC_PARALLEL_HPP
