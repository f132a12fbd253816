#pragma once

#include <cstddef>
#include <functional>

namespace purelax {

/// Worker count: hardware concurrency, capped by PURELAX_THREADS when set.
std::size_t thread_count();

/// Runs body(i) for i in [0, count) on up to thread_count() threads. The first
/// exception thrown by any call is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace purelax
