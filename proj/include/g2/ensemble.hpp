#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace g2 {

/// Worker count: G2_THREADS if set to a positive integer, else the OpenMP default.
int worker_count();

/// Evaluate fn(i) for i in [0, n) and return the results in index order.
///
/// threads == 1 runs the plain serial loop, which is the reference the
/// parallel path is tested against. Otherwise samples are spread over an
/// OpenMP team; each result lands in its own slot, so the output never
/// depends on scheduling. If several samples throw, the exception of the
/// lowest index is rethrown.
template <class R, class Fn>
std::vector<R> map_samples(std::size_t n, int threads, Fn&& fn) {
  std::vector<R> out(n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(n);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace g2
