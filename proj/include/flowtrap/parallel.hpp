#pragma once

#include <cstddef>

#include <functional>

namespace flowtrap {

// Worker count resolution: explicit request > FLOWTRAP_THREADS > hardware.
// A request of 0 means "decide for me".
unsigned thread_count(unsigned requested = 0);

// Runs fn(begin, end) over a partition of [0, n). Small n runs inline on the
// calling thread. fn must be safe to call concurrently on disjoint ranges.
void parallel_chunks(std::size_t n, unsigned threads,
                     const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace flowtrap
