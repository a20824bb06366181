#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace covwig {

/// Runs fn(0) .. fn(trials - 1) on up to `workers` threads and returns the
/// results in trial order. The first exception thrown by any trial is
/// rethrown after all workers have stopped.
template <typename Fn>
auto run_trials(int trials, int workers, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, int>> {
  using Result = std::invoke_result_t<Fn&, int>;
  std::vector<Result> results(static_cast<std::size_t>(std::max(trials, 0)));
  if (trials <= 0) return results;

  const int threads = std::clamp(workers, 1, trials);
  if (threads == 1) {
    for (int t = 0; t < trials; ++t) results[static_cast<std::size_t>(t)] = fn(t);
    return results;
  }

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (int t = next++; t < trials && !failed; t = next++) {
      try {
        results[static_cast<std::size_t>(t)] = fn(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return results;
}

}  // namespace covwig
