#pragma once

#include <functional>

namespace homogeig {

/// Runs body(0) ... body(n - 1) on up to `jobs` threads (jobs <= 1 runs
/// inline, in order). Results must go to per-index slots. If any call
/// throws, the exception of the smallest failing index is rethrown after
/// all threads have joined.
void parallel_for(int n, int jobs, const std::function<void(int)>& body);

/// Thread count for `jobs` <= 0: the hardware concurrency, at least 1.
int default_jobs();

}  // namespace homogeig
