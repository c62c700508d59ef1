#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace onebit {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream key from a master seed and a list of tags,
/// e.g. derive_stream(seed, {purpose, trial, realization}).
constexpr std::uint64_t derive_stream(std::uint64_t seed,
                                      std::initializer_list<std::uint64_t> tags) noexcept {
  std::uint64_t key = mix64(seed + kGoldenGamma);
  for (std::uint64_t tag : tags) {
    key = mix64(key ^ mix64(tag + kGoldenGamma));
  }
  return key;
}

/// Counter-based 64-bit generator: the i-th output is a pure function of
/// (key, i), so any position of a stream can be reached in O(1).
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  constexpr explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGoldenGamma);
  }

  constexpr void discard(std::uint64_t n) noexcept { counter_ += n; }
  constexpr std::uint64_t position() const noexcept { return counter_; }
  constexpr std::uint64_t key() const noexcept { return key_; }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace onebit
