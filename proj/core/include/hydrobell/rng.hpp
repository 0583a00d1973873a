#pragma once

#include <cstdint>

namespace hydrobell {

// SplitMix64: tiny, fast, and identical on every platform. std::
// distributions are implementation-defined, which would break the
// bit-reproducibility guarantees, so draws go through these helpers only.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform double in [-half_width, +half_width).
  double next_symmetric(double half_width) {
    return (next_unit() - 0.5) * (2.0 * half_width);
  }

 private:
  std::uint64_t state_;
};

// One-shot mix used for per-run seed derivation.
inline std::uint64_t mix_u64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_run_seed(std::uint64_t master_seed,
                                     std::uint64_t run_index) {
  return mix_u64(master_seed ^ mix_u64(run_index + 0x9E3779B97F4A7C15ULL));
}

}  // namespace hydrobell
