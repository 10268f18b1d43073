#pragma once

#include <cstddef>
#include <functional>

namespace kgds {

// Worker count: KGDS_THREADS if set and positive, otherwise the hardware concurrency.
int worker_count();

// Runs body(i) for i in [0, n). Each index is visited exactly once; results must be
// written to index-owned slots so the outcome does not depend on scheduling. The
// exception thrown by the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace kgds
