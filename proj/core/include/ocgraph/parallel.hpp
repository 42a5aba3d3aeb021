#pragma once
#include <cstddef>
#include <functional>

namespace ocgraph {

// Worker cap shared by the row-parallel kernels and (when linked) OpenBLAS.
// Defaults to hardware_concurrency, clamped by the OCGRAPH_THREADS env var.
std::size_t max_threads();
void set_max_threads(std::size_t n);

// Splits [0, n) into at most max_threads() contiguous chunks and runs
// fn(begin, end) on each. Chunk boundaries depend only on n and the thread
// cap, and every index is written by exactly one worker, so results are
// bitwise reproducible for a fixed configuration. Serial when n < min_grain
// or a single worker is available.
void parallel_for(std::size_t n, std::size_t min_grain,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace ocgraph
