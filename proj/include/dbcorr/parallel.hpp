// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic fork-join helpers. Work is cut into blocks whose boundaries
// depend only on the item count, each block is reduced sequentially, and the
// block results come back in block order. Output is therefore independent of
// the number of worker threads.

#ifndef DBCORR_PARALLEL_HPP_
#define DBCORR_PARALLEL_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dbcorr {

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Calls fn(block_index, begin, end) for every block of `block_size` items and
// returns the results indexed by block.
template <class Fn>
auto parallel_blocks(std::uint64_t count, std::uint64_t block_size,
                     unsigned threads, Fn fn) {
  using R = decltype(fn(std::uint64_t{0}, std::uint64_t{0}, std::uint64_t{0}));
  const std::uint64_t blocks =
      count == 0 ? 0 : (count + block_size - 1) / block_size;
  std::vector<R> out(blocks);
  auto run = [&](std::uint64_t b) {
    const std::uint64_t begin = b * block_size;
    out[b] = fn(b, begin, std::min(count, begin + block_size));
  };
  const unsigned workers = static_cast<unsigned>(
      std::min<std::uint64_t>(resolve_threads(threads), blocks));
  if (workers <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) run(b);
    return out;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t b = next++; b < blocks; b = next++) {
        try {
          run(b);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
          next = blocks;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

// out[i] = fn(i), evaluated in parallel.
template <class Fn>
auto parallel_map(std::uint64_t count, unsigned threads, Fn fn) {
  using R = decltype(fn(std::uint64_t{0}));
  std::vector<R> out(count);
  parallel_blocks(count, 1, threads, [&](std::uint64_t, std::uint64_t b,
                                         std::uint64_t e) {
    for (std::uint64_t i = b; i < e; ++i) out[i] = fn(i);
    return 0;
  });
  return out;
}

// Welford accumulator with Chan's pairwise merge. Merging in a fixed order
// keeps results bitwise reproducible.
struct Moments {
  std::uint64_t count = 0;
  double mean_ = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count);
    m2 += delta * (x - mean_);
  }
  void merge(const Moments& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(o.count);
    const double delta = o.mean_ - mean_;
    const double total = na + nb;
    mean_ += delta * nb / total;
    m2 += o.m2 + delta * delta * na * nb / total;
    count += o.count;
  }
  double mean() const { return mean_; }
  // Unbiased sample variance.
  double variance() const {
    return count < 2 ? 0.0 : m2 / static_cast<double>(count - 1);
  }
  double std_error() const;
};

inline double Moments::std_error() const {
  return count == 0 ? 0.0
                    : std::sqrt(variance() / static_cast<double>(count));
}

inline constexpr std::uint64_t kTrialBlock = 1024;

}  // namespace dbcorr

#endif  // DBCORR_PARALLEL_HPP_
