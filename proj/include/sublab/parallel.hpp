#pragma once

#include <functional>

namespace sublab {

// Static-stride parallel loop. Thread count: SUBLAB_THREADS when set, else
// hardware concurrency, capped by n. Per-index work must be independent;
// the first exception is rethrown after join.
void parallel_for(int n, const std::function<void(int)>& fn);

} // namespace sublab
