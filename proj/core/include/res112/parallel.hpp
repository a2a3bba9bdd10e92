#pragma once

#include <cstddef>
#include <functional>

namespace res112 {

// workers <= 0 picks the hardware concurrency. Calls fn(i) for i in [0, n)
// with results written by index, so output order never depends on workers.
// The first exception thrown by any task is rethrown.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

int resolve_workers(int workers);

}  // namespace res112
