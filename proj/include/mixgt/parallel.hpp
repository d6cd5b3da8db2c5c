#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace mixgt {

/// Number of workers to use when the caller passes 0.
inline unsigned default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1u : n;
}

/// Calls fn(row) for every row in [0, rows), splitting contiguous row blocks
/// across `workers` threads. Each row must be independent of the others, so
/// the result never depends on the worker count. The first exception thrown
/// by any worker is rethrown on the calling thread.
template <typename Fn>
void parallel_rows(std::size_t rows, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = default_workers();
  const std::size_t n = std::min<std::size_t>(workers, rows);
  if (n <= 1) {
    for (std::size_t r = 0; r < rows; ++r) fn(r);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  {
    std::vector<std::jthread> threads;
    threads.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t begin = rows * t / n;
      const std::size_t end = rows * (t + 1) / n;
      threads.emplace_back([&fn, &errors, t, begin, end] {
        try {
          for (std::size_t r = begin; r < end; ++r) fn(r);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace mixgt
