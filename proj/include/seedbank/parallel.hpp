#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace seedbank {

/// Worker count: `requested` if nonzero, otherwise hardware concurrency.
inline unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Evaluates f(i) for i in [0, count) with static round-robin assignment
/// (worker w takes i = w, w + W, ...). Results are stored by index, so the
/// output does not depend on the worker count as long as f(i) depends only
/// on i. The first exception thrown by any f(i) is rethrown.
template <class F>
auto parallel_map(std::size_t count, unsigned workers, F&& f) {
  using R = decltype(f(std::size_t{}));
  std::vector<R> out(count);
  const unsigned w = std::max(1u, std::min<unsigned>(resolve_workers(workers),
                                                     static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (w == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(w);
  for (unsigned t = 0; t < w; ++t) {
    threads.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < count; i += w) out[i] = f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace seedbank
