#pragma once

#include <functional>

namespace gsp {

// Worker-thread budget: GSP_LAB_THREADS when set (0 means auto), otherwise
// the hardware concurrency.
int thread_budget();

// Run fn(i) for i in [0, n). Work is split into contiguous chunks, so
// writes into preallocated index-addressed buffers stay deterministic no
// matter how many threads run. The first worker exception is rethrown.
void parallel_for(long n, const std::function<void(long)>& fn);

}  // namespace gsp
