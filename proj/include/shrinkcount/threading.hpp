#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace shrinkcount {

// Worker cap: SHRINKCOUNT_THREADS when set (>= 1), else hardware concurrency.
int max_threads();

// Runs body(i) for i in [0, count) across up to `threads` std::threads with a
// static stride partition. Bodies must write only to their own slots; callers
// reduce afterwards in index order, so results never depend on the thread
// count. threads <= 1 runs inline.
template <class Body>
void parallel_for(std::size_t count, int threads, Body&& body) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += n_workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace shrinkcount
