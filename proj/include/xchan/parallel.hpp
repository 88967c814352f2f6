// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace xchan {

inline unsigned worker_count(std::size_t tasks) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(hw, std::max<std::size_t>(tasks, 1)));
}

// Runs body(i) for i in [0, n). Tasks are handed out dynamically; the first
// exception thrown by any task is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t n, Body&& body, unsigned threads = 0) {
  if (n == 0) return;
  if (threads == 0) threads = worker_count(n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// Streaming mean/variance. merge() is Chan's parallel update.
struct Moments {
  double count = 0;
  double mean = 0;
  double m2 = 0;

  void add(double x) {
    count += 1;
    double d = x - mean;
    mean += d / count;
    m2 += d * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    double n = count + o.count;
    double d = o.mean - mean;
    mean += d * o.count / n;
    m2 += o.m2 + d * d * count * o.count / n;
    count = n;
  }

  double variance() const { return count > 1 ? m2 / (count - 1) : 0.0; }
  double std_error() const { return count > 0 ? std::sqrt(variance() / count) : 0.0; }
};

// Pairwise tree reduction in a fixed shape, so the result depends only on
// the order of `parts`, never on how they were produced.
template <class T, class Merge>
T tree_reduce(std::vector<T> parts, Merge&& merge) {
  if (parts.empty()) return T{};
  for (std::size_t stride = 1; stride < parts.size(); stride *= 2)
    for (std::size_t i = 0; i + stride < parts.size(); i += 2 * stride) merge(parts[i], parts[i + stride]);
  return parts.front();
}

}  // namespace xchan
