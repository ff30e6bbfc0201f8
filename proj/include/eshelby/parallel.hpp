#pragma once

#include <cstddef>
#include <functional>

namespace eshelby {

// Worker count: ESHELBY_THREADS when set (>= 1), otherwise the hardware count.
int thread_count();

// Runs body(i) for i in [0, n). Each index is written by exactly one worker, so
// results do not depend on the thread count. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace eshelby
