#pragma once

#include <cstddef>
#include <functional>

namespace fastescape {

/// Worker count: explicit request > FASTESCAPE_THREADS env > hardware.
/// Always at least 1.
int worker_count(int requested = 0);

/**
 * Run fn(i) for i = 0..n-1 on `workers` threads (0 = worker_count()).
 * Work is handed out in contiguous blocks by atomic counter; fn must write
 * only to its own slot i so results are identical for any worker count.
 */
void parallel_for(size_t n, const std::function<void(size_t)>& fn, int workers = 0);

} // namespace fastescape
