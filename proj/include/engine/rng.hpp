#pragma once

#include <cstdint>
#include <random>

namespace engine {

// SplitMix64: used only to expand a user seed into independent stream seeds.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

// Generator for (seed, stream); distinct streams are statistically independent.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  SplitMix64 sm(seed ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
  std::seed_seq seq{static_cast<std::uint32_t>(sm.next()), static_cast<std::uint32_t>(sm.next()),
                    static_cast<std::uint32_t>(sm.next()), static_cast<std::uint32_t>(sm.next())};
  return std::mt19937_64(seq);
}

// Uniform in [0, n), n > 0. Rejection keeps it unbiased and independent of
// the standard library's distribution implementation.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  for (;;) {
    const std::uint64_t r = rng();
    if (r < limit) return r % n;
  }
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline bool bernoulli(std::mt19937_64& rng, double p) { return uniform_unit(rng) < p; }

}  // namespace engine
