#pragma once

// Index-parallel loop that rethrows the first exception on the calling
// thread. Results must be written to per-index slots by the body.

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>

#include "graphmass/quad.hpp"

namespace graphmass::detail {

template <class Body>
void for_each_index(std::size_t count, quad::Exec exec, Body&& body) {
  if (exec == quad::Exec::Serial) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex guard;
  std::atomic<bool> failed{false};
  const auto total = static_cast<long long>(count);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < total; ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!failure) failure = std::current_exception();
      failed.store(true, std::memory_order_relaxed);
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace graphmass::detail
