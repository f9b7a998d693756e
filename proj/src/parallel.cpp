#include "mbgk/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>

namespace mbgk {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int n, int threads, const std::function<void(int, int)>& body) {
  if (n <= 0) return;
  const int nt = std::min(resolve_threads(threads), n);
  if (nt <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  std::atomic<int> failed{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  const int chunk = (n + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    const int lo = t * chunk;
    const int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        body(lo, hi);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(1);
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failed.load()) std::rethrow_exception(first_error);
}

}  // namespace mbgk
