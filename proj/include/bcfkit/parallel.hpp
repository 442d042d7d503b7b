// parallel.hpp — minimal fork/join loop over an index range

#pragma once

#include <cstddef>
#include <functional>

namespace bcfkit {

// Worker count: BCFKIT_THREADS if set (≥1), else hardware concurrency.
unsigned worker_count();

// Runs body(i) for i in [0, n) on up to worker_count() threads. Each index is
// visited exactly once; the first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace bcfkit
