#pragma once
// Minimal bounded worker pool for sweep points. Results are written by index,
// so output order never depends on scheduling. The first exception (lowest
// point index) wins and is rethrown after all workers drain.
//
// Callers must set a covering arithmetic precision BEFORE dispatching: the
// multiprecision default is process-global, so workers must never mutate it.

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace obslab {

template <class Body>
void parallel_for(int n, int jobs, Body&& body) {
  if (n <= 0) return;
  if (jobs < 1) jobs = 1;
  jobs = std::min<int>(jobs, n);
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  int first_error_index = -1;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (first_error_index < 0 || i < first_error_index) {
          first_error_index = i;
          first_error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(jobs);
  for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace obslab
