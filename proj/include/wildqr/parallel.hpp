#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "wildqr/types.hpp"

namespace wildqr {

// Run fn(0..count-1) on up to `threads` workers. Work items must be
// independent; callers that need deterministic aggregation write into
// per-index slots and reduce afterwards. The first exception thrown by fn is
// rethrown on the calling thread after all workers join.
inline void parallel_for(Index count, int threads, const std::function<void(Index)>& fn) {
  if (count <= 0) return;
  if (threads < 1) threads = 1;
  const auto workers = static_cast<Index>(threads);
  if (workers == 1 || count == 1) {
    for (Index i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto body = [&] {
    for (;;) {
      const Index i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const Index spawn = std::min<Index>(workers, count);
  pool.reserve(static_cast<std::size_t>(spawn));
  for (Index t = 0; t < spawn; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace wildqr
