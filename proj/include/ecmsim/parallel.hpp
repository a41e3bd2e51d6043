#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

// Small deterministic work-pool helpers. Work is split on a fixed chunk grid
// that does not depend on the thread count; results are either written to
// disjoint slots or committed in chunk order, so outputs are bit-identical
// for any number of threads.

namespace ecmsim {

inline std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  const auto hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Runs fn(chunk_index) for chunk_index in [0, num_chunks). fn must only
// touch state owned by its chunk.
template <typename Fn>
void parallel_for(std::size_t num_chunks, std::size_t threads, Fn&& fn) {
  threads = resolve_threads(threads);
  if (threads <= 1 || num_chunks <= 1) {
    for (std::size_t i = 0; i < num_chunks; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= num_chunks) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n = std::min(threads, num_chunks);
  pool.reserve(n);
  for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Computes Partial = compute(chunk) in parallel and feeds the partials to
// commit(chunk, partial) strictly in chunk order. Use for reductions whose
// accumulation order must be fixed (floating-point determinism).
template <typename Partial, typename Compute, typename Commit>
void parallel_ordered_reduce(std::size_t num_chunks, std::size_t threads,
                             Compute&& compute, Commit&& commit) {
  threads = resolve_threads(threads);
  if (threads <= 1 || num_chunks <= 1) {
    for (std::size_t i = 0; i < num_chunks; ++i) commit(i, compute(i));
    return;
  }
  std::mutex m;
  std::condition_variable cv;
  std::size_t next_commit = 0;
  std::atomic<std::size_t> next_chunk{0};
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next_chunk.fetch_add(1);
      if (i >= num_chunks) return;
      try {
        Partial partial = compute(i);
        std::unique_lock lock(m);
        cv.wait(lock, [&] { return next_commit == i || error; });
        if (error) return;
        commit(i, std::move(partial));
        ++next_commit;
        cv.notify_all();
      } catch (...) {
        std::lock_guard lock(m);
        if (!error) error = std::current_exception();
        cv.notify_all();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n = std::min(threads, num_chunks);
  pool.reserve(n);
  for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace ecmsim
