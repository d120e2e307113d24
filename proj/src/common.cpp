#include "htom/common.hpp"

#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

namespace htom {

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng Rng::substream(uint64_t seed, uint64_t stream) {
  return Rng(splitmix64(seed) ^ splitmix64(stream * 0xA24BAED4963EE407ULL + 1));
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform01();
  double u2 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * kPi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

std::size_t chunk_count(std::size_t n_items, std::size_t chunk_size) {
  return (n_items + chunk_size - 1) / chunk_size;
}

void parallel_chunks(std::size_t n_items, std::size_t chunk_size, int n_threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (n_items == 0) return;
  const std::size_t n_chunks = chunk_count(n_items, chunk_size);
  auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = c * chunk_size;
    const std::size_t end = std::min(begin + chunk_size, n_items);
    fn(c, begin, end);
  };
  if (n_threads <= 1 || n_chunks == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      run_chunk(c);
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<int>(n_threads, static_cast<int>(n_chunks));
  pool.reserve(n);
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace htom
