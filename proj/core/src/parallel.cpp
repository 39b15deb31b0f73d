#include "teq/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <future>
#include <string>
#include <thread>

namespace teq {

namespace {

int initial_budget() {
  if (const char* env = std::getenv("TEQ_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<int>& total() {
  static std::atomic<int> t{initial_budget()};
  return t;
}

// Free worker slots; the calling thread itself is not counted.
std::atomic<int>& free_slots() {
  static std::atomic<int> s{total().load() - 1};
  return s;
}

bool try_acquire() {
  int cur = free_slots().load();
  while (cur > 0)
    if (free_slots().compare_exchange_weak(cur, cur - 1)) return true;
  return false;
}

}  // namespace

int thread_budget() { return total().load(); }

void set_thread_budget(int threads) {
  threads = std::max(1, threads);
  const int old = total().exchange(threads);
  free_slots() += threads - old;
}

void parallel_run(bool allow, const std::vector<std::function<void()>>& tasks) {
  std::vector<std::exception_ptr> errors(tasks.size());
  std::vector<std::future<void>> pending;
  std::vector<std::size_t> inline_tasks;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (allow && i + 1 < tasks.size() && try_acquire()) {
      pending.push_back(std::async(std::launch::async, [&, i] {
        try {
          tasks[i]();
        } catch (...) {
          errors[i] = std::current_exception();
        }
        free_slots() += 1;
      }));
    } else {
      inline_tasks.push_back(i);
    }
  }
  for (std::size_t i : inline_tasks) {
    try {
      tasks[i]();
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& f : pending) f.wait();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace teq
