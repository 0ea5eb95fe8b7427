#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace kkharm {

namespace detail {
// Set inside worker threads so nested parallel loops run serially instead of
// multiplying the thread count.
inline thread_local bool in_parallel_region = false;
}  // namespace detail

/// Calls f(i) for i in [0, count) on up to hardware_concurrency threads.
/// Each index is visited exactly once; f must only write to slots owned by i.
/// The first exception thrown by any worker is rethrown on the caller.
template <class F>
void parallel_for(std::size_t count, F&& f) {
  const std::size_t workers =
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1 || detail::in_parallel_region) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      detail::in_parallel_region = true;
      try {
        for (std::size_t i = w; i < count; i += workers) f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Sum of f(i) over [0, count), evaluated in parallel and reduced in index
/// order so the result does not depend on scheduling.
template <class F>
double parallel_sum(std::size_t count, F&& f) {
  std::vector<double> parts(count);
  parallel_for(count, [&](std::size_t i) { parts[i] = f(i); });
  double sum = 0.0;
  for (double v : parts) sum += v;
  return sum;
}

}  // namespace kkharm
