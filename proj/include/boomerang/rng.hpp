#pragma once

#include <array>
#include <cstdint>

namespace boomerang {

// All randomness in the project flows through this header. The generators are
// fixed algorithms (splitmix64 finalizer + xoshiro256++) rather than <random>
// engines/distributions so that identical seeds give identical streams on every
// platform and standard library.

// splitmix64 step: advances z by the golden-ratio increment and returns the
// finalizer mix. The composed map is a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Independent stream seed for (master, index). Injective in `index` for a fixed
// master (odd multiplier, bijective mix), so derived seeds are pairwise distinct.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master + 0x9E3779B97F4A7C15ull * (index + 1));
}

// Reserved stream indices for non-trial randomness (trial i uses index i).
constexpr std::uint64_t kGraphStream = (1ull << 62);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t z = seed;
    for (auto& w : s_) {
      z += 0x9E3779B97F4A7C15ull;
      std::uint64_t v = z;
      v = (v ^ (v >> 30)) * 0xBF58476D1CE4E5B9ull;
      v = (v ^ (v >> 27)) * 0x94D049BB133111EBull;
      w = v ^ (v >> 31);
    }
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9E3779B97F4A7C15ull;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_in(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform on {0, ..., n-1}, unbiased via rejection. n must be > 0.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_;
};

}  // namespace boomerang
