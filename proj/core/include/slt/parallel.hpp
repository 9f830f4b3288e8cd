#pragma once

#include <functional>

namespace slt {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Work is split into
// contiguous static chunks, so results written by index are identical for any
// worker count. workers <= 1 runs inline. Exceptions from fn are captured and
// the first one rethrown on the calling thread.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

// std::thread::hardware_concurrency with a floor of 1.
int default_workers();

}  // namespace slt
