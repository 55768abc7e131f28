#include "kappa/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kappa {
namespace {

int env_threads() {
  if (const char* s = std::getenv("KAPPA_THREADS")) {
    const int v = std::atoi(s);
    if (v > 0) return v;
  }
  return 1;
}

std::atomic<int>& thread_setting() {
  static std::atomic<int> value{env_threads()};
  return value;
}

}  // namespace

int default_threads() { return thread_setting().load(); }

void set_default_threads(int threads) { thread_setting().store(std::max(1, threads)); }

void parallel_for(size_t n, const std::function<void(size_t)>& body, int threads) {
  if (threads <= 0) threads = default_threads();
  const size_t workers = std::min<size_t>(static_cast<size_t>(threads), n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    const size_t begin = n * w / workers, end = n * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        for (size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

}  // namespace kappa
