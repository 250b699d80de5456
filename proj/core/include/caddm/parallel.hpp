#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace caddm {

// Static-partition parallel loop. Worker t handles the contiguous index
// range [t*n/jobs, (t+1)*n/jobs), so the work assignment is a pure function
// of (n, jobs) and results can be reduced in index order afterwards.
// jobs <= 1 runs inline.
inline void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
  if (n == 0) return;
  if (jobs <= 1 || n == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  size_t workers = std::min<size_t>(static_cast<size_t>(jobs), n);
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  threads.reserve(workers);
  for (size_t t = 0; t < workers; ++t) {
    size_t lo = n * t / workers;
    size_t hi = n * (t + 1) / workers;
    threads.emplace_back([lo, hi, t, &fn, &errors] {
      try {
        for (size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace caddm
