#include "gfluct/reduction.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace gfluct {

namespace {
std::atomic<int> g_threads{1};
}

int thread_count() { return g_threads.load(); }

void set_thread_count(int k) { g_threads.store(k < 1 ? 1 : k); }

double pairwise_sum(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n <= 32) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

void parallel_for_chunks(std::size_t n_chunks,
                         const std::function<void(std::size_t)>& body) {
  const int t = thread_count();
  if (t <= 1 || n_chunks <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) body(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      body(c);
    }
  };
  std::vector<std::thread> pool;
  const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(t), n_chunks);
  pool.reserve(nt);
  for (std::size_t i = 0; i < nt; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace gfluct
