#pragma once

#include <cstddef>
#include <functional>

namespace genodyn {

/// Worker count for embarrassingly parallel sweeps. Respects the
/// GENODYN_THREADS environment variable; defaults to the hardware count.
std::size_t worker_count();

/// Runs fn(0..n-1) on up to worker_count() threads. Work items must be
/// independent; callers merge results by index so the outcome does not
/// depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace genodyn
