// parallel.hpp — Bounded worker pool over an index range

#pragma once

#include <cstddef>
#include <functional>

namespace parament {

// 0 selects the hardware concurrency.
unsigned resolve_threads(unsigned requested);

// Runs fn(i) for every i in [0, n) on at most `threads` workers. The first exception
// stops the remaining work and is rethrown once all workers have joined.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

} // namespace parament
