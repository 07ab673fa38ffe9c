// rng.hpp -- counter-based seeded generator. Per-stream states derived from
// (seed, index) pairs so results are independent of evaluation order.
#pragma once

#include <cstdint>

namespace gasketlab {

struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t s) : state(s) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform in {0, ..., bound-1}, bound > 0
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }
};

// decorrelated stream for (seed, index)
inline SplitMix64 stream_rng(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 h(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
  h.next();
  h.next();
  return h;
}

} // namespace gasketlab
