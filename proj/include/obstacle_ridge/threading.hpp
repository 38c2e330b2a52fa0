#pragma once

#include <cstdint>
#include <functional>

namespace obstacle_ridge {

/// Worker-count hint for parallel_for. 1 disables threading.
void set_worker_count(int workers);
int worker_count();

namespace detail {
void parallel_for_impl(std::int64_t count,
                       const std::function<void(std::int64_t, std::int64_t)>& run_range);
}

/// Runs fn(i) for i in [0, count). Iterations must write to disjoint state;
/// under that contract the result is identical for every worker count.
/// Nested calls degrade to the serial path.
template <class F>
void parallel_for(std::int64_t count, F&& fn) {
  detail::parallel_for_impl(count, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) fn(i);
  });
}

}  // namespace obstacle_ridge
