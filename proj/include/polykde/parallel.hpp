#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace polykde {

// Global cap on worker threads used by the parallel kernels. 0 = OpenMP default.
void set_max_threads(int t);
int max_threads();

namespace detail {
inline int resolve_threads(int requested) {
#ifdef _OPENMP
  return requested > 0 ? requested : omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}
}  // namespace detail

// Parallel loop over [0, n). Outputs written by `body(i)` must be independent
// per index so results do not depend on the thread count.
template <class F>
void parallel_for(std::int64_t n, F&& body) {
#ifdef _OPENMP
  const int nt = detail::resolve_threads(max_threads());
#pragma omp parallel for schedule(static) num_threads(nt)
  for (std::int64_t i = 0; i < n; ++i) body(i);
#else
  for (std::int64_t i = 0; i < n; ++i) body(i);
#endif
}

// Sum of f(i) over [0, n) with summation order fixed by block id, not by
// thread count: partial sums per 1024-wide block, then a serial pass.
template <class F>
double deterministic_sum(std::int64_t n, F&& f) {
  constexpr std::int64_t block = 1024;
  const std::int64_t nblocks = (n + block - 1) / block;
  std::vector<double> partial(static_cast<std::size_t>(nblocks), 0.0);
  parallel_for(nblocks, [&](std::int64_t b) {
    const std::int64_t lo = b * block;
    const std::int64_t hi = lo + block < n ? lo + block : n;
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += f(i);
    partial[static_cast<std::size_t>(b)] = s;
  });
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

}  // namespace polykde
