#pragma once

#include <cstddef>
#include <functional>

namespace rshock {

/// Worker count: RSHOCK_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

/// Calls body(k) for k in [0, count) split into contiguous chunks across
/// threads. Each k is written by exactly one worker, so results do not depend
/// on the thread count as long as body(k) only touches slot k.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace rshock
