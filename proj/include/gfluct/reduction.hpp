#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace gfluct {

// Worker count used by parallel loops. Output of every computation in this
// library is identical for any value; this only trades wall clock for cores.
int thread_count();
void set_thread_count(int k);

// Pairwise (tree) summation with a split order fixed by element position.
double pairwise_sum(std::span<const double> xs);

// Runs body(c) for c in [0, n_chunks). Work items are claimed dynamically,
// so bodies must write only to their own slot; combine results afterwards in
// chunk order (e.g. with pairwise_sum) to keep the output thread-invariant.
void parallel_for_chunks(std::size_t n_chunks,
                         const std::function<void(std::size_t)>& body);

}  // namespace gfluct
