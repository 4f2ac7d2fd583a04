// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hpbrdf {

inline int& thread_count_storage() {
  static int count = 0;
  return count;
}

/// Worker count used by data-parallel stages; 0 means hardware concurrency.
inline void set_thread_count(int threads) { thread_count_storage() = std::max(0, threads); }

inline int thread_count() {
  const int n = thread_count_storage();
  if (n > 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [begin, end) over contiguous static chunks. Each
/// index is processed exactly once, so results do not depend on the
/// worker count as long as body(i) only writes to slots owned by i.
template <typename Body>
void parallel_for(std::int64_t begin, std::int64_t end, Body&& body) {
  const std::int64_t n = end - begin;
  if (n <= 0) return;
  const int workers = static_cast<int>(std::min<std::int64_t>(thread_count(), n));
  if (workers <= 1) {
    for (std::int64_t i = begin; i < end; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const std::int64_t lo = begin + n * w / workers;
    const std::int64_t hi = begin + n * (w + 1) / workers;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::int64_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace hpbrdf
