#pragma once

// Deterministic fan-out over an index range with std::thread. Results are
// stored by index, so output never depends on scheduling.

#include <algorithm>
#include <atomic>
#include <deque>
#include <exception>
#include <iterator>
#include <mutex>
#include <thread>
#include <vector>

namespace gdisp {

inline int& default_threads() {
  static int t = 1;
  return t;
}

template <class F>
auto parallel_map(size_t count, F f, int threads = default_threads()) -> std::vector<decltype(f(size_t{}))> {
  using T = decltype(f(size_t{}));
  threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max<size_t>(count, 1))));
  if (threads == 1) {
    std::vector<T> out;
    out.reserve(count);
    for (size_t i = 0; i < count; ++i) out.push_back(f(i));
    return out;
  }
  std::deque<T> slots(count);  // no bit packing, so distinct slots are independent
  std::atomic<size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          slots[i] = f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return std::vector<T>(std::make_move_iterator(slots.begin()), std::make_move_iterator(slots.end()));
}

}  // namespace gdisp
