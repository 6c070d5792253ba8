#pragma once

#include <cstddef>
#include <functional>

namespace hygronet {

/// Upper bound on worker threads used by parallel_for. 0 selects the
/// hardware concurrency; the HYGRONET_THREADS environment variable is read
/// once on first use when no explicit value was set.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Calls body(i) for i in [0, n). Iterations must be independent; callers
/// write results into pre-sized per-index slots so output order never
/// depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace hygronet
