#ifndef KUZLAB_PARALLEL_HPP_
#define KUZLAB_PARALLEL_HPP_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kuzlab {

namespace detail {
inline std::atomic<int> &thread_setting() {
  static std::atomic<int> threads{0};
  return threads;
}
}  // namespace detail

// Number of worker threads used by library sweeps. Zero means
// std::thread::hardware_concurrency().
inline void set_thread_count(int threads) {
  detail::thread_setting().store(std::max(0, threads));
}

inline int thread_count() {
  const int configured = detail::thread_setting().load();
  if (configured > 0) return configured;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Evaluates `work(chunk)` for chunk = 0..num_chunks-1 and returns the results
// indexed by chunk. The chunk decomposition is fixed by the caller, so any
// reduction done over the returned vector in index order is bit-identical
// regardless of how many threads ran.
template <typename Result, typename Work>
std::vector<Result> map_chunks(std::size_t num_chunks, Work &&work) {
  std::vector<Result> results(num_chunks);
  const std::size_t workers =
      std::min<std::size_t>(num_chunks, static_cast<std::size_t>(thread_count()));
  if (workers <= 1) {
    for (std::size_t c = 0; c < num_chunks; ++c) results[c] = work(c);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto loop = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= num_chunks) return;
      try {
        results[c] = work(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(num_chunks);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(loop);
  for (auto &t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace kuzlab

#endif  // KUZLAB_PARALLEL_HPP_
