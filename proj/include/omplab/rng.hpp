#pragma once

// Deterministic random number generation.
//
// Every randomized routine in the library draws from xoshiro256++
// (Blackman & Vigna, 2019) seeded through the splitmix64 finalizer.
// Streams are derived by chaining the finalizer over a base seed and a
// sequence of words (purpose tag, grid coordinates, trial index, ...):
//
//   s <- mix64(s ^ (word + 0x9E3779B97F4A7C15))   for each word
//
// The chain is order sensitive, so (m, k, trial) always names the same
// stream regardless of thread schedule, platform, or call site. Nothing
// here touches <random> distributions, whose output is
// implementation-defined; all conversions to doubles are spelled out.

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace omplab::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer (Stafford mix13 variant used by splitmix64).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Order-sensitive seed chain; see file comment.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> words) {
  std::uint64_t s = base;
  for (std::uint64_t w : words) s = mix64(s ^ (w + kGolden));
  return s;
}

// Compile-time FNV-1a over a short ASCII label; used as the purpose tag
// fed into derive_seed so distinct consumers get distinct streams.
constexpr std::uint64_t purpose_tag(const char* label) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char* p = label; *p != '\0'; ++p) {
    h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(*p));
    h *= 0x100000001B3ULL;
  }
  return h;
}

// xoshiro256++ with splitmix64 state expansion.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) {
      sm += kGolden;
      word = mix64(sm);
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), unbiased via rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  // Random sign, +1 or -1.
  double sign() { return (next() >> 63) ? -1.0 : 1.0; }

  // Standard normal via the Marsaglia polar method (pairs cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    for (;;) {
      const double u = 2.0 * uniform01() - 1.0;
      const double v = 2.0 * uniform01() - 1.0;
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) {
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * scale;
        has_spare_ = true;
        return u * scale;
      }
    }
  }

  // k distinct values from [0, n), sorted ascending (Floyd's algorithm).
  std::vector<std::size_t> sample_combination(std::size_t n, std::size_t k);

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int r) {
    return (x << r) | (x >> (64 - r));
  }

  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace omplab::rng
