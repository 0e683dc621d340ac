#pragma once

#include <cstdint>

namespace leadscore {

// SplitMix64 with per-entity stream derivation. Streams are keyed by hashing
// (seed, quarter, lead, purpose), so growing a config never perturbs the
// draws of entities that already existed.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound) via 128-bit multiply; bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  // Standard normal via inverse-CDF (rational approximation), so draws are
  // plain arithmetic rather than trigonometry.
  double next_normal();

 private:
  std::uint64_t state_;
};

// Order-sensitive 64-bit mixing for stream derivation.
std::uint64_t mix_streams(std::uint64_t a, std::uint64_t b);

inline std::uint64_t mix_streams(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix_streams(mix_streams(a, b), c);
}

inline std::uint64_t mix_streams(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                                 std::uint64_t d) {
  return mix_streams(mix_streams(a, b, c), d);
}

}  // namespace leadscore
