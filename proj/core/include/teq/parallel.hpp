#pragma once

#include <functional>
#include <vector>

namespace teq {

// Process-wide cap on extra worker threads, read once from TEQ_THREADS
// (default: hardware concurrency). A task only gets a thread when a slot is
// free; otherwise it runs inline, so nested parallel regions cannot oversubscribe.
int thread_budget();
void set_thread_budget(int threads);

// Runs all tasks, in parallel when allowed and slots are free. Exceptions are
// rethrown after every task has finished; the first one in task order wins.
void parallel_run(bool allow, const std::vector<std::function<void()>>& tasks);

template <class F, class G>
void parallel_invoke(bool allow, F&& f, G&& g) {
  parallel_run(allow, {std::function<void()>(std::forward<F>(f)), std::function<void()>(std::forward<G>(g))});
}

}  // namespace teq
