#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace mbgk {

// Blocked parallel loop over [0, n). threads == 0 picks the hardware width,
// threads == 1 runs inline. Exceptions from workers are rethrown on the caller.
void parallel_for(int n, int threads, const std::function<void(int, int)>& body);

int resolve_threads(int requested);

}  // namespace mbgk
