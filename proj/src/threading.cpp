#include "obstacle_ridge/threading.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace obstacle_ridge {

namespace {
std::atomic<int> g_workers{1};
thread_local bool t_inside_parallel = false;
}  // namespace

void set_worker_count(int workers) { g_workers.store(std::max(1, workers)); }

int worker_count() { return g_workers.load(); }

namespace detail {

void parallel_for_impl(std::int64_t count,
                       const std::function<void(std::int64_t, std::int64_t)>& run_range) {
  if (count <= 0) return;
  const int workers = std::min<std::int64_t>(g_workers.load(), count);
  if (workers <= 1 || t_inside_parallel) {
    run_range(0, count);
    return;
  }
  // Chunked work stealing off a shared counter. Chunk boundaries do not
  // affect results because iterations touch disjoint state.
  const std::int64_t chunk = std::max<std::int64_t>(1, count / (8 * workers));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr first_error = nullptr;
  std::atomic<bool> failed{false};

  auto body = [&]() {
    t_inside_parallel = true;
    for (;;) {
      const std::int64_t lo = next.fetch_add(chunk);
      if (lo >= count || failed.load()) break;
      const std::int64_t hi = std::min(lo + chunk, count);
      try {
        run_range(lo, hi);
      } catch (...) {
        if (!failed.exchange(true)) first_error = std::current_exception();
        break;
      }
    }
    t_inside_parallel = false;
  };

  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) threads.emplace_back(body);
  body();
  for (auto& th : threads) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail
}  // namespace obstacle_ridge
