#include "boxplus/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace boxplus {

void parallel_trials(int n_trials, int n_threads, const std::function<void(int)>& fn) {
  if (n_trials <= 0) return;
  n_threads = std::max(1, std::min(n_threads, n_trials));
  if (n_threads == 1) {
    for (int i = 0; i < n_trials; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int w = 0; w < n_threads; ++w)
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n_trials; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

int default_thread_count() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace boxplus
