#include "khmut/parallel.hpp"

namespace khmut {

namespace {
std::atomic<int> g_jobs{0};
}

int default_jobs() {
  int j = g_jobs.load();
  if (j > 0) return j;
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_default_jobs(int jobs) { g_jobs = jobs; }

}  // namespace khmut
