#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace khmut {

// Worker count used when a caller passes jobs <= 0.
int default_jobs();
void set_default_jobs(int jobs);

namespace detail {
inline thread_local bool inside_parallel_for = false;
}

// Calls fn(i) for every i in [0, n). Work is claimed dynamically, so fn must
// write only to slot i of any shared output; the result is then independent
// of the worker count. The first exception thrown by any fn is rethrown.
// Nested calls run serially on the calling worker.
template <class Fn>
void parallel_for(size_t n, Fn&& fn, int jobs = 0) {
  if (jobs <= 0) jobs = default_jobs();
  if (detail::inside_parallel_for) jobs = 1;
  size_t workers = std::min<size_t>(static_cast<size_t>(jobs), n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    detail::inside_parallel_for = true;
    for (size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
    detail::inside_parallel_for = false;
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace khmut
