#pragma once

#include <cstddef>
#include <functional>

namespace bohmflow::numerics {

/// Worker count: BOHMFLOW_THREADS if set to a positive integer, otherwise the
/// hardware concurrency, never less than one.
std::size_t worker_count();

/// Runs body(i) for i in [0, n) over contiguous chunks on worker_count() threads.
/// Each index is processed exactly once; body must not depend on execution order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace bohmflow::numerics
