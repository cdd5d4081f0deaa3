#pragma once

#include <cstddef>
#include <functional>

namespace geoml {

/// Worker count: GEO_THREADS if set and positive, otherwise hardware concurrency.
std::size_t thread_count();

/// Runs body(i) for i in [0, n) across up to thread_count() threads. Work units
/// must write only to their own slot; results are therefore independent of
/// scheduling. The first exception thrown by any unit is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace geoml
