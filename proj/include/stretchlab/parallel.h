#pragma once

// Minimal data-parallel helper. The worker count defaults to the hardware
// concurrency and is capped by the STRETCHLAB_THREADS environment variable.

#include <cstddef>
#include <functional>

namespace stretchlab {

int thread_count();

/// Calls f(i) for i in [0, n), possibly concurrently. Exceptions thrown by f
/// are rethrown on the calling thread (the first one wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace stretchlab
