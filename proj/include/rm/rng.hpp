#pragma once

#include <cstdint>

namespace rm {

// SplitMix64 finalizer; the basis for all randomness in the project.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double to_unit(std::uint64_t h) {
  // 53 mantissa bits -> uniform in [0,1)
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Sequential stream with a hashed seed; one instance per consumer.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(mix64(seed)) {}
  RandomStream(std::uint64_t seed, std::uint64_t substream)
      : state_(mix64(mix64(seed) ^ substream)) {}

  double next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return to_unit(z ^ (z >> 31));
  }

  // Uniform integer in [0, n)
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(next() * static_cast<double>(n)) % n;
  }

 private:
  std::uint64_t state_;
};

// Counter-based draw keyed by (seed, path, kind, stage, period). Every draw
// is addressable, so simulation results do not depend on evaluation order
// or thread count.
enum class DrawKind : std::uint64_t { Product = 1, Accept = 2, Survival = 3 };

inline double keyed_draw(std::uint64_t seed, std::uint64_t path, DrawKind kind,
                         std::uint64_t stage, std::uint64_t period) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ (path + 0x1000000));
  h = mix64(h ^ static_cast<std::uint64_t>(kind));
  h = mix64(h ^ (stage + 1));
  h = mix64(h ^ (period + 1));
  return to_unit(h);
}

}  // namespace rm
