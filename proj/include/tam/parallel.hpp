#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace tam {

// Static block partition over [begin, end). Each index must write only its
// own output slots, so results are identical for every thread count. The
// first exception thrown by any worker is rethrown on the caller.
inline void parallel_for(int64_t begin, int64_t end, int threads,
                         const std::function<void(int64_t, int64_t)>& body) {
  const int64_t count = end - begin;
  if (count <= 0) return;
  if (threads <= 1 || count == 1) {
    body(begin, end);
    return;
  }
  const int nt = static_cast<int>(std::min<int64_t>(threads, count));
  const int64_t chunk = (count + nt - 1) / nt;
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int t = 0; t < nt; ++t) {
    const int64_t b = begin + t * chunk;
    const int64_t e = std::min(end, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&, b, e] {
      try {
        body(b, e);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace tam
