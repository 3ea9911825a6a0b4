#pragma once

#include <functional>

namespace vspline {

// Runs fn(0..count-1), spreading work over up to `jobs` threads. Results must
// be written to pre-sized slots so output order never depends on scheduling.
// The first exception thrown by any task is rethrown on the caller's thread.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn);

}  // namespace vspline
