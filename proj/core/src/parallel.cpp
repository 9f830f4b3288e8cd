#include "slt/parallel.hpp"

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace slt {

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  workers = std::min(std::max(workers, 1), n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errs(static_cast<std::size_t>(workers));
  const int base = n / workers;
  const int extra = n % workers;
  int start = 0;
  for (int w = 0; w < workers; ++w) {
    const int count = base + (w < extra ? 1 : 0);
    const int lo = start;
    const int hi = start + count;
    start = hi;
    threads.emplace_back([lo, hi, w, &fn, &errs] {
      try {
        for (int i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errs[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errs) {
    if (e) std::rethrow_exception(e);
  }
}

int default_workers() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

}  // namespace slt
