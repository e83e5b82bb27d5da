#pragma once

#include <cstddef>
#include <functional>

namespace meanfield {

/// Worker cap: hardware concurrency, lowered by MEANFIELD_THREADS when set.
unsigned worker_count();

/// Runs body(i) for i in [0, count) across worker_count() threads. Each index
/// is visited exactly once; the first exception thrown is rethrown here.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace meanfield
