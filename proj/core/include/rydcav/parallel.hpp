#pragma once

#include <cstddef>
#include <functional>

namespace rydcav {

/// Worker count used when a caller passes threads <= 0. Reads RYDCAV_THREADS,
/// falling back to std::thread::hardware_concurrency().
int default_thread_count();

/// Runs fn(i) for i in [0, n). Each index is visited exactly once; results
/// must be written to per-index slots so output order never depends on
/// scheduling. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace rydcav
