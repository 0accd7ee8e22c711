#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ktp {

/// Worker cap shared by every parallel routine. Zero means "all hardware threads".
struct Execution {
  unsigned threads = 0;

  unsigned resolved() const {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    return threads == 0 ? hw : threads;
  }
};

/// Runs body(i) for i in [0, count). Work is split into contiguous blocks, so
/// any body that writes only to slot i yields results independent of the
/// worker count. The first exception thrown by a worker is rethrown.
template <typename Body>
void parallel_for(std::size_t count, const Execution& exec, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(exec.resolved(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ktp
