#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace eed {

/// Runs fn(block) for block in [0, num_blocks) on up to `threads` workers.
/// Block boundaries never depend on the thread count, so any reduction that
/// combines per-block results in block order is bit-identical for every N.
inline void parallel_blocks(size_t num_blocks, int threads,
                            const std::function<void(size_t)>& fn) {
  if (threads <= 1 || num_blocks <= 1) {
    for (size_t b = 0; b < num_blocks; ++b) fn(b);
    return;
  }
  std::atomic<size_t> next{0};
  const size_t workers = std::min<size_t>(static_cast<size_t>(threads), num_blocks);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t i = 0; i < workers; ++i)
    pool.emplace_back([&] {
      while (true) {
        const size_t b = next.fetch_add(1);
        if (b >= num_blocks) break;
        fn(b);
      }
    });
  for (auto& t : pool) t.join();
}

}  // namespace eed
