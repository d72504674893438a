#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace fixmag {

/// Evaluates fn(0), ..., fn(count - 1) on a small thread pool and returns the
/// results in index order, so the output does not depend on scheduling.
template <class Fn>
auto run_replicas(std::size_t count, Fn fn, std::size_t max_threads = 0) {
  using Result = decltype(fn(std::size_t{0}));
  std::vector<Result> out(count);
  std::size_t workers = max_threads ? max_threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) out[i] = fn(i);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace fixmag
