#pragma once

#include <cstddef>
#include <functional>

namespace qdist {

/// Worker count: QDIST_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t thread_count();

/// Runs body(i) for i in [0, n). Tasks must write only to slots they own;
/// callers aggregate by index afterwards, so results never depend on
/// scheduling. The first exception thrown by any task is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace qdist
