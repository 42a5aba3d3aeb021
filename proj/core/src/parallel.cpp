#include "ocgraph/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#ifdef OCGRAPH_USE_CBLAS
extern "C" void openblas_set_num_threads(int);
#endif

namespace ocgraph {

namespace {

std::size_t initial_cap() {
  std::size_t n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("OCGRAPH_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
  }
  return n;
}

std::atomic<std::size_t>& cap_ref() {
  static std::atomic<std::size_t> cap{0};
  return cap;
}

void apply_blas_cap(std::size_t n) {
#ifdef OCGRAPH_USE_CBLAS
  openblas_set_num_threads(static_cast<int>(n));
#else
  (void)n;
#endif
}

}  // namespace

std::size_t max_threads() {
  std::size_t cur = cap_ref().load(std::memory_order_relaxed);
  if (cur == 0) {
    cur = initial_cap();
    cap_ref().store(cur, std::memory_order_relaxed);
    apply_blas_cap(cur);
  }
  return cur;
}

void set_max_threads(std::size_t n) {
  if (n == 0) n = 1;
  cap_ref().store(n, std::memory_order_relaxed);
  apply_blas_cap(n);
}

void parallel_for(std::size_t n, std::size_t min_grain,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t workers = std::min(max_threads(), std::max<std::size_t>(1, n / std::max<std::size_t>(1, min_grain)));
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t begin = n * w / workers;
    std::size_t end = n * (w + 1) / workers;
    if (begin == end) continue;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace ocgraph
