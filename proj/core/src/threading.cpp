#include "radonkit/threading.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

#include "radonkit/errors.hpp"

namespace radonkit {

namespace {

std::atomic<int> g_num_threads{0};  // 0: not set yet, use hardware default

int default_threads() {
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : int(hc);
}

}  // namespace

void set_num_threads(int n) {
  if (n < 1) throw ValidationError("thread count must be >= 1, got " + std::to_string(n));
  g_num_threads.store(n);
}

int num_threads() {
  int n = g_num_threads.load();
  return n > 0 ? n : default_threads();
}

void parallel_for(int64_t begin, int64_t end, const std::function<void(int64_t, int64_t)>& body) {
  int64_t range = end - begin;
  if (range <= 0) return;
  int64_t k = std::min<int64_t>(num_threads(), range);
  if (k <= 1) {
    body(begin, end);
    return;
  }
  int64_t q = range / k;
  int64_t r = range % k;
  std::vector<std::thread> workers;
  workers.reserve(size_t(k - 1));
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto run_chunk = [&](int64_t c) {
    int64_t lo = begin + c * q + std::min(c, r);
    int64_t hi = lo + q + (c < r ? 1 : 0);
    try {
      body(lo, hi);
    } catch (...) {
      if (!failed.exchange(true)) error = std::current_exception();
    }
  };
  for (int64_t c = 1; c < k; ++c) workers.emplace_back(run_chunk, c);
  run_chunk(0);
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace radonkit
