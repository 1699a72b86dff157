#pragma once

#include <functional>

namespace amgd {

// Runs fn(0) .. fn(n-1), possibly concurrently. The worker count comes from
// the AMGD_PARALLEL environment variable and defaults to one thread per cell;
// fn must be safe to call from multiple threads for distinct indices. The
// first exception thrown by any cell is rethrown after all workers finish.
void parallel_for(long n, const std::function<void(long)>& fn);

// The worker count parallel_for would use for n cells.
long parallel_degree(long n);

}  // namespace amgd
