#pragma once

#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>

#include <omp.h>

namespace fclt {

/// Worker count for the OpenMP kernels. threads <= 0 means all logical cores;
/// threads == 1 runs the serial reference path.
struct ExecPolicy {
  int threads = 0;

  static ExecPolicy serial() { return {1}; }
  int resolved() const { return threads > 0 ? threads : omp_get_max_threads(); }
};

/// Runs body(i) for i in [0, n). Iterations must write only to slots owned
/// by i. If any iteration throws, the exception of the lowest failing index
/// is rethrown after the loop, so the outcome does not depend on scheduling.
template <class Body>
void parallel_for(std::size_t n, const ExecPolicy& exec, Body&& body) {
  const int threads = exec.resolved();
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::mutex mu;
  std::size_t failed_at = std::numeric_limits<std::size_t>::max();
  std::exception_ptr failure;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for num_threads(threads) schedule(dynamic)
  for (long long k = 0; k < count; ++k) {
    const auto i = static_cast<std::size_t>(k);
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (i < failed_at) {
        failed_at = i;
        failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace fclt
