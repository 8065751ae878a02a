#pragma once

#include <cstdint>
#include <vector>

namespace steinlab {

// Number of worker threads the parallel kernels may use. Defaults to the
// OpenMP thread count, capped by the STEINLAB_THREADS environment variable
// (read once at first call).
int thread_cap();

// Override the cap programmatically (0 restores the environment default).
void set_thread_cap(int n);

// Static-schedule parallel loop over [begin, end). The body must be safe to
// run concurrently for distinct indices.
template <typename Body>
void parallel_for(std::int64_t begin, std::int64_t end, const Body& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(thread_cap())
#endif
  for (std::int64_t i = begin; i < end; ++i) body(i);
}

// Deterministic parallel reduction: partial sums are formed over fixed-size
// blocks and combined in block-index order, so the result does not depend on
// the thread count or schedule.
template <typename T, typename Term>
T blocked_sum(std::int64_t n, const Term& term, std::int64_t block = 2048) {
  if (n <= 0) return T{};
  const std::int64_t nblocks = (n + block - 1) / block;
  std::vector<T> partial(static_cast<std::size_t>(nblocks), T{});
  parallel_for(0, nblocks, [&](std::int64_t b) {
    const std::int64_t lo = b * block;
    const std::int64_t hi = lo + block < n ? lo + block : n;
    T acc{};
    for (std::int64_t i = lo; i < hi; ++i) acc += term(i);
    partial[static_cast<std::size_t>(b)] = acc;
  });
  T total{};
  for (const T& p : partial) total += p;
  return total;
}

}  // namespace steinlab
