#pragma once

#include <functional>

namespace fpprop {

/// Worker cap for data-parallel loops. Reads FPPROP_THREADS once; falls back
/// to the hardware concurrency (at least 1).
int max_threads();

/// Runs fn over [begin, end) split into contiguous chunks, one thread per
/// chunk. fn(lo, hi) must only write to per-index state, so results do not
/// depend on the thread count. Runs inline when the range is small or only
/// one worker is available.
void parallel_for(long begin, long end, const std::function<void(long, long)>& fn);

}  // namespace fpprop
