#pragma once

#include <cstdint>
#include <limits>

namespace wxr {

/// SplitMix64 finalizer; a bijection on 64-bit integers.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Order-sensitive combination of two words into one well-mixed key.
constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(mix64(a) ^ (b + 0x632be59bd9b4e019ULL + (a << 6) + (a >> 2)));
}

/// Counter-based generator: output n is a keyed hash of n, so substreams with
/// distinct keys are independent and any position is reproducible.
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) noexcept : key_(mix64(key)) {}

  /// Independent substream for (seed, stream index).
  static CounterRng substream(std::uint64_t seed, std::uint64_t stream) noexcept {
    return CounterRng(hash_combine(seed, stream));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    return mix64(key_ ^ mix64(counter_++ * 0xd1342543de82ef95ULL + 1));
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t position() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Standard normal variates by the Marsaglia polar method.
class NormalSampler {
 public:
  double operator()(CounterRng& rng) noexcept;

 private:
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace wxr
