#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace kappa {

/// Worker count used by the library. Defaults to KAPPA_THREADS from the
/// environment, else 1.
int default_threads();
void set_default_threads(int threads);

/// Calls body(i) for i in [0, n) on up to `threads` workers (0 = default).
/// Indices are split into contiguous blocks; body must write only to
/// per-index storage. The first exception thrown by any worker is rethrown.
void parallel_for(size_t n, const std::function<void(size_t)>& body, int threads = 0);

/// Pairwise (tree) summation in index order; independent of scheduling.
double pairwise_sum(std::span<const double> values);

}  // namespace kappa
