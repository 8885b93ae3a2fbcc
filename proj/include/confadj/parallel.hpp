#pragma once

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "confadj/error.hpp"

namespace confadj {

// Runs fn(i) for i in [0, count) across up to `threads` workers with a
// striped assignment.  Exceptions are captured and the first one rethrown
// after all workers join.  Work item i always receives the same index, so
// output written by index is identical for any thread count.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  require(threads >= 1, errc::invalid_argument,
          "parallel_for: threads must be >= 1");
  if (threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

} // namespace confadj
