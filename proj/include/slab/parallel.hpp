#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace slab {

// Worker count used by parallel_for. Defaults to hardware concurrency.
void set_thread_count(int threads);
int thread_count();

// Runs fn(i) for every i in [0, count). Work is split into contiguous static
// chunks; callers write results into per-index slots and reduce afterwards so
// the outcome does not depend on the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

// Fixed-tree pairwise summation. The tree depends only on the input length.
double pairwise_sum(std::span<const double> values);

inline double pairwise_sum(const std::vector<double>& values) {
  return pairwise_sum(std::span<const double>(values.data(), values.size()));
}

}  // namespace slab
