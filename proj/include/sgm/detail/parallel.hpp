#pragma once

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace sgm {

template <class T, class F>
std::vector<T> parallel_map(size_t count, int jobs, F f) {
  std::vector<T> out(count);
  if (jobs <= 1 || count <= 1) {
    for (size_t i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errs(count);
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs && t < static_cast<int>(count); ++t)
    pool.emplace_back([&] {
      for (size_t i; (i = next++) < count;) {
        try {
          out[i] = f(i);
        } catch (...) {
          errs[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace sgm
