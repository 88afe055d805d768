#include "edaqa/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace edaqa {

namespace {
std::atomic<int> g_workers{1};
thread_local bool t_inside_worker = false;
}  // namespace

void set_worker_count(int n) { g_workers.store(std::max(1, n)); }
int worker_count() { return g_workers.load(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n));
  if (workers <= 1 || t_inside_worker) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    t_inside_worker = true;
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
    t_inside_worker = false;
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t unit) {
  // splitmix64 finaliser over a combination of both inputs.
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (unit + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace edaqa
