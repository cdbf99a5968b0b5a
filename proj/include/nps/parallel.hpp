#pragma once
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace nps {

// worker count capped by the NPS_THREADS environment variable
inline unsigned worker_count() {
  if (const char* env = std::getenv("NPS_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// runs body(i) for i in [0, n); callers write results into slot i of a
// pre-sized buffer so the reduction order is independent of thread count
template <class F>
void parallel_for(std::size_t n, F&& body) {
  unsigned workers = worker_count();
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      body(i);
    }
  };
  std::vector<std::thread> pool;
  unsigned spawn = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  pool.reserve(spawn);
  for (unsigned t = 0; t < spawn; ++t) pool.emplace_back(run);
  for (auto& th : pool) th.join();
}

} // namespace nps
