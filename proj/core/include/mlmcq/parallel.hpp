#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mlmcq {

/// Samples per work item. Fixed so that chunk boundaries, and therefore the
/// reduction order, never depend on the worker count.
inline constexpr std::uint64_t kDefaultChunk = 4096;

/// Splits [begin, end) into fixed-size chunks, evaluates fn(chunk_begin,
/// chunk_end) on up to `workers` threads and returns the results in chunk order.
template <class Result, class Fn>
std::vector<Result> parallel_chunks(std::uint64_t begin, std::uint64_t end, unsigned workers, Fn&& fn,
                                    std::uint64_t chunk = kDefaultChunk) {
  if (end <= begin) return {};
  const std::uint64_t n_chunks = (end - begin + chunk - 1) / chunk;
  std::vector<Result> results(n_chunks);
  auto run_chunk = [&](std::uint64_t c) {
    const std::uint64_t lo = begin + c * chunk;
    const std::uint64_t hi = std::min(end, lo + chunk);
    results[c] = fn(lo, hi);
  };

  const unsigned threads =
      static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, workers), n_chunks));
  if (threads == 1) {
    for (std::uint64_t c = 0; c < n_chunks; ++c) run_chunk(c);
    return results;
  }

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t c = next++; c < n_chunks; c = next++) {
        try {
          run_chunk(c);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n_chunks;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace mlmcq
