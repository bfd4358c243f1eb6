#pragma once

#include <cstdint>
#include <random>

namespace gso {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic substream keyed by (master seed, up to three stream keys).
/// Variates are produced by explicit bit manipulation on top of mt19937_64,
/// so sequences are identical across standard library implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t master, std::uint64_t key1 = 0, std::uint64_t key2 = 0,
                        std::uint64_t key3 = 0)
      : gen_(mix64(mix64(mix64(mix64(master) ^ key1) ^ key2) ^ key3)) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; generated in pairs.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Uniform integer in [0, n), unbiased by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t draw;
    do {
      draw = gen_();
    } while (draw >= limit);
    return draw % n;
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gso
