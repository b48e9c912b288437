#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace spfim {

// Replicates are grouped into blocks of this size regardless of the worker
// count, and blocks are merged in a fixed pairwise tree. Together these make
// every reduction bit-identical across worker counts.
inline constexpr std::size_t kReplicateBlock = 64;

// Worker count to use when the caller passes 0.
std::size_t default_workers();

// Runs block_fn(begin, end) for each block of [0, count) on up to `workers`
// threads and reduces the per-block results with merge(a, b) -> a.
// After a failure the remaining blocks are skipped and the lowest-index
// failure observed is rethrown.
template <typename Acc, typename BlockFn, typename Merge>
Acc parallel_block_reduce(std::size_t count, std::size_t workers, BlockFn&& block_fn,
                          Merge&& merge) {
  const std::size_t blocks = (count + kReplicateBlock - 1) / kReplicateBlock;
  if (blocks == 0) return Acc{};
  std::vector<Acc> results(blocks);
  std::vector<std::exception_ptr> errors(blocks);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto work = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= blocks || failed.load()) return;
      const std::size_t begin = b * kReplicateBlock;
      const std::size_t end = std::min(count, begin + kReplicateBlock);
      try {
        results[b] = block_fn(begin, end);
      } catch (...) {
        errors[b] = std::current_exception();
        failed.store(true);
      }
    }
  };

  const std::size_t threads = std::min(blocks, workers == 0 ? default_workers() : workers);
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (std::size_t width = 1; width < blocks; width *= 2) {
    for (std::size_t i = 0; i + width < blocks; i += 2 * width) merge(results[i], results[i + width]);
  }
  return std::move(results[0]);
}

}  // namespace spfim
