#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace fluxbench {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Work items must be
/// independent and write only to their own slot; the result is then identical
/// for any job count.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
  if (n == 0) return;
  if (jobs <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min(jobs, n);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  std::atomic<std::size_t> next{0};
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        fn(i);
      }
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace fluxbench
