#ifndef PCMEAN_SRC_PARALLEL_HPP
#define PCMEAN_SRC_PARALLEL_HPP

#include <atomic>
#include <thread>
#include <vector>

namespace pcm::detail {

inline int resolve_threads(int requested, int jobs) {
  int t = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (t < 1) t = 1;
  return t < jobs ? t : jobs;
}

// Runs body(i) for i in [0, jobs) on a small worker pool. The body must not
// throw; each job writes only to its own slot of preallocated storage, so the
// aggregate is independent of scheduling.
template <class Body>
void parallel_for(int jobs, int threads, Body&& body) {
  threads = resolve_threads(threads, jobs);
  if (threads <= 1) {
    for (int i = 0; i < jobs; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < jobs; i = next.fetch_add(1)) body(i);
    });
  }
  for (std::thread& th : pool) th.join();
}

}  // namespace pcm::detail

#endif
