#pragma once

#include <cstddef>
#include <functional>

namespace unfold {

/// Worker count: hardware concurrency capped by UNFOLD_THREADS when set.
std::size_t thread_count();

/// Runs body(i) for i in [0, count). Iterations are split into contiguous
/// blocks, one per worker; body must only write to slots owned by i, which
/// keeps results independent of the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace unfold
