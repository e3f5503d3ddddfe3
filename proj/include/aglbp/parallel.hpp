#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace aglbp {

/// Worker count: `requested` if > 0, else AGLBP_THREADS if set, else the
/// hardware concurrency.
int resolve_threads(int requested = 0);

/// Calls fn(i) for i in [0, n) on up to `threads` workers. Each index is
/// handled exactly once; if several calls throw, the exception from the
/// lowest index is rethrown so failures are reproducible.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace aglbp
