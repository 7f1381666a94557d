#pragma once

#include <functional>

namespace boxplus {

// Runs fn(trial) for trial in [0, n_trials) on up to n_threads workers.
// Trials must be independent (each derives its own RNG stream and writes to
// its own slot); results are then identical for any thread count.
void parallel_trials(int n_trials, int n_threads, const std::function<void(int)>& fn);

int default_thread_count();

}  // namespace boxplus
