#pragma once

#include <cstddef>
#include <functional>

namespace scarsim {

// SCARSIM_THREADS wins over `requested`; 0 means hardware concurrency.
int resolve_threads(int requested);

// Dynamic index distribution over a fixed pool; the first exception is rethrown after all workers join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace scarsim
