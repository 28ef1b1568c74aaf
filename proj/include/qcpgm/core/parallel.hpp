#pragma once

#include <cstddef>
#include <functional>

namespace qcpgm::core {

/// Worker count taken from QCPGM_THREADS if set (clamped to >= 1), otherwise
/// hardware concurrency. The value is a hint; results never depend on it.
int thread_count();

/// Runs fn(i) for i in [0, n). Iterations must be independent; they write
/// only to disjoint state. The first exception thrown by any worker is
/// rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace qcpgm::core
