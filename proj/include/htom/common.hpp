#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace htom {

// Bad arguments, malformed files, out-of-range configuration. CLI maps this
// to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Degenerate data or a numerically undefined statistic. CLI maps this to
// exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;

uint64_t splitmix64(uint64_t x);

// Deterministic random generator. All draws go through uniform01()/gaussian()
// built directly on the mt19937_64 word stream, so sequences are identical
// across platforms for a given seed.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(splitmix64(seed)) {}

  // Independent stream derived from (seed, stream index). Used for per-event
  // substreams so parallel synthesis is independent of scheduling order.
  static Rng substream(uint64_t seed, uint64_t stream);

  uint64_t next_u64() { return eng_(); }

  // Uniform on [0, 1).
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller, one spare cached.
  double gaussian();

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Runs fn(begin, end) over fixed-size chunks of [0, n_items), possibly on
// several threads. Chunk boundaries do not depend on the thread count, so a
// reduction that combines per-chunk partials in chunk order gives the same
// bits regardless of how many threads run.
void parallel_chunks(std::size_t n_items, std::size_t chunk_size, int n_threads,
                     const std::function<void(std::size_t chunk_index, std::size_t begin,
                                              std::size_t end)>& fn);

std::size_t chunk_count(std::size_t n_items, std::size_t chunk_size);

}  // namespace htom
