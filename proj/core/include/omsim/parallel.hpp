#pragma once

#include <cstddef>
#include <functional>

namespace omsim {

/// Worker count: OMSIM_THREADS if set to a positive integer, capped by the
/// hardware concurrency otherwise used as the default.
unsigned default_parallelism();

/// Calls fn(i) for i in [0, count) on up to `threads` workers (0 = default).
/// Items must be independent; the first exception thrown is rethrown after
/// all workers have joined.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace omsim
