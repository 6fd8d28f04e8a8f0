#pragma once

#include <cstdint>

namespace scribe {

/// SplitMix64 (Steele, Lea & Flood). State advances by the golden-ratio
/// increment; output is the standard two-multiply finaliser. Fully specified
/// here so splits can be reproduced in any language.
class SplitMix64 {
public:
  static constexpr std::uint64_t kIncrement = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kMix1 = 0xBF58476D1CE4E5B9ULL;
  static constexpr std::uint64_t kMix2 = 0x94D049BB133111EBULL;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += kIncrement;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * kMix1;
    z = (z ^ (z >> 27)) * kMix2;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, bound) by rejection of the biased tail.
  constexpr std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound <= 1) {
      return 0;
    }
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t r = next();
    while (r >= limit) {
      r = next();
    }
    return r % bound;
  }

private:
  std::uint64_t state_;
};

} // namespace scribe
