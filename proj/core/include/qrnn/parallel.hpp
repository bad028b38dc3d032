#pragma once

#include <cstddef>
#include <functional>

namespace qrnn {

/// Worker count: QRNN_FORGE_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
unsigned default_thread_count();

/// Calls fn(i) for i in [0, n) on up to `threads` workers (0 = default).
/// Each index runs exactly once; results must be written to per-index slots.
/// The first exception thrown by any call is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned threads = 0);

}  // namespace qrnn
