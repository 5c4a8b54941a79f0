#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fmforge {

// Global cap on worker threads used by the parallel kernels. 0 = hardware default.
inline int& thread_cap_slot() {
  static int cap = 0;
  return cap;
}
inline void set_max_threads(int n) { thread_cap_slot() = n; }
inline int max_threads() { return thread_cap_slot(); }

// Runs body(i) for i in [0, n). Results must be written to per-index slots;
// callers do any reduction afterwards in a fixed order, so the output is
// identical for any thread count.
template <typename Body>
void parallel_for(std::int64_t n, Body&& body) {
#ifdef _OPENMP
  const int nt = max_threads();
#pragma omp parallel for schedule(static) num_threads(nt > 0 ? nt : omp_get_max_threads())
  for (std::int64_t i = 0; i < n; ++i) body(i);
#else
  for (std::int64_t i = 0; i < n; ++i) body(i);
#endif
}

// Serial twin of parallel_for, kept as the reference path for tests and benchmarks.
template <typename Body>
void serial_for(std::int64_t n, Body&& body) {
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace fmforge
