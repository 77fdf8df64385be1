#include "pmelab/common.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace pme {

namespace {
std::atomic<int> g_threads{1};
constexpr std::size_t kChunk = 1024;
}  // namespace

void set_thread_count(int n) { g_threads.store(std::max(1, n)); }
int thread_count() { return g_threads.load(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t nchunks = (n + kChunk - 1) / kChunk;
  const int T = std::min<std::size_t>(thread_count(), nchunks);
  if (T <= 1) {
    for (std::size_t c = 0; c < nchunks; ++c)
      body(c, c * kChunk, std::min(n, (c + 1) * kChunk));
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next.fetch_add(1); c < nchunks; c = next.fetch_add(1))
      body(c, c * kChunk, std::min(n, (c + 1) * kChunk));
  };
  std::vector<std::thread> pool;
  pool.reserve(T - 1);
  for (int t = 0; t + 1 < T; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

double parallel_reduce(std::size_t n, const std::function<double(std::size_t, std::size_t)>& chunk_sum) {
  if (n == 0) return 0.0;
  const std::size_t nchunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(nchunks, 0.0);
  parallel_for(n, [&](std::size_t c, std::size_t b, std::size_t e) { partial[c] = chunk_sum(b, e); });
  KahanSum s;
  for (double x : partial) s.add(x);
  return s.value();
}

std::uint64_t fnv1a64(std::span<const char> bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

}  // namespace pme
