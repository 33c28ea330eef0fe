#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <span>
#include <vector>

namespace dflab {

/// Worker count used by parallel_for. Taken from DFLAB_THREADS on first use
/// unless overridden with set_thread_count.
int thread_count();
void set_thread_count(int n);

/// Calls body(i) for i in [0, n). Indices are statically partitioned, so the
/// set of results never depends on the worker count; the first exception by
/// index order is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Pairwise (cascade) sum over a fixed binary tree with sequential leaves of
/// at most 8 elements. The tree depends only on values.size().
double pairwise_sum(std::span<const double> values);

/// Fixed-shape reduction over [0, n): body(begin, end) produces a partial for
/// each block of `block` consecutive indices, and the partials are combined
/// pairwise in index order. Blocks may run in parallel.
template <class T, class Body, class Combine>
T blocked_reduce(std::size_t n, std::size_t block, const T& zero, Body&& body,
                 Combine&& combine) {
  if (n == 0) return zero;
  const std::size_t nblocks = (n + block - 1) / block;
  std::vector<T> partial(nblocks, zero);
  parallel_for(nblocks, [&](std::size_t b) {
    const std::size_t begin = b * block;
    const std::size_t end = begin + block < n ? begin + block : n;
    partial[b] = body(begin, end);
  });
  for (std::size_t width = 1; width < nblocks; width *= 2) {
    for (std::size_t i = 0; i + width < nblocks; i += 2 * width) {
      partial[i] = combine(partial[i], partial[i + width]);
    }
  }
  return partial[0];
}

}  // namespace dflab
