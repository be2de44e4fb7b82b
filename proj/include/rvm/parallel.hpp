#pragma once

// Minimal fork-join executor with reductions whose result does not depend on
// the number of workers: work is cut into fixed-size blocks, each block is
// reduced serially, and block partials are combined in block order.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rvm {

class Executor {
 public:
  explicit Executor(int workers = 1) : workers_(std::max(1, workers)) {}

  int workers() const { return workers_; }

  /// Calls fn(task) for every task in [0, n_tasks). Exceptions from workers
  /// are rethrown on the calling thread (first one wins).
  template <class F>
  void for_each_task(std::size_t n_tasks, F&& fn) const {
    const std::size_t n_threads = std::min<std::size_t>(workers_, n_tasks);
    if (n_threads <= 1) {
      for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
      return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n_tasks) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(n_tasks);
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads - 1);
    for (std::size_t t = 0; t + 1 < n_threads; ++t) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

 private:
  int workers_;
};

inline constexpr std::size_t kReductionBlock = 4096;

/// Sum of term(i) for i in [0, n), reproducible across worker counts.
template <class F>
double ordered_sum(const Executor& ex, std::size_t n, F&& term,
                   std::size_t block = kReductionBlock) {
  const std::size_t n_blocks = (n + block - 1) / block;
  std::vector<double> partial(n_blocks, 0.0);
  ex.for_each_task(n_blocks, [&](std::size_t b) {
    const std::size_t lo = b * block, hi = std::min(n, lo + block);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += term(i);
    partial[b] = acc;
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

/// Max of value(i) for i in [0, n); returns `empty` when n == 0.
template <class F>
double ordered_max(const Executor& ex, std::size_t n, F&& value, double empty = 0.0,
                   std::size_t block = kReductionBlock) {
  if (n == 0) return empty;
  const std::size_t n_blocks = (n + block - 1) / block;
  std::vector<double> partial(n_blocks);
  ex.for_each_task(n_blocks, [&](std::size_t b) {
    const std::size_t lo = b * block, hi = std::min(n, lo + block);
    double acc = value(lo);
    for (std::size_t i = lo + 1; i < hi; ++i) acc = std::max(acc, value(i));
    partial[b] = acc;
  });
  return *std::max_element(partial.begin(), partial.end());
}

}  // namespace rvm
