#pragma once
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace airylab {

// Number of workers to use for `requested` (0 means hardware concurrency).
int resolve_threads(int requested);

// Runs fn(replica_index) for indices [0, count) on `threads` workers and
// returns results ordered by index. Work items must be independent; results
// never depend on scheduling because each item owns its index-derived stream.
template <typename T>
std::vector<T> parallel_map(long long count, int threads,
                            const std::function<T(long long)>& fn) {
  std::vector<T> out(static_cast<std::size_t>(count));
  int workers = resolve_threads(threads);
  if (workers <= 1 || count <= 1) {
    for (long long i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  std::atomic<long long> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        long long i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          out[static_cast<std::size_t>(i)] = fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failed.load()) std::rethrow_exception(error);
  return out;
}

}  // namespace airylab
