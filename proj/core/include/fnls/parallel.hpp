#ifndef FNLS_PARALLEL_HPP
#define FNLS_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fnls {

inline int default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Run fn(i) for i in [0, count) on up to `workers` threads.
///
/// Work items are claimed from a shared atomic counter; results must be
/// written to per-index slots so that the outcome is independent of the
/// schedule. The first exception thrown by any item is rethrown on the
/// calling thread after all threads join.
template <typename Fn>
void parallel_for(long long count, int workers, Fn&& fn) {
  if (count <= 0) return;
  if (workers < 1) workers = 1;
  const int n_threads = static_cast<int>(std::min<long long>(workers, count));
  if (n_threads == 1) {
    for (long long i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<long long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const long long i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count, std::memory_order_relaxed);  // drain remaining work
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace fnls

#endif
