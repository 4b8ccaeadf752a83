#pragma once

#include <cstdint>
#include <string_view>

namespace normlab {

/// Counter-based generator: output(counter) = mix(key + counter * gamma),
/// with the SplitMix64 finalizer as the mixing function. Any output is
/// addressable directly, so a lazily-extended stream yields the same
/// values however it is grown.
class CounterRng {
 public:
  static constexpr std::string_view kAlgorithm = "splitmix64-counter";

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t at(std::uint64_t counter) const { return mix(key_ + counter * kGamma); }
  /// Two-level counter for per-item retry sequences.
  std::uint64_t at(std::uint64_t item, std::uint64_t attempt) const {
    return mix(at(item) ^ (attempt * 0xd1b54a32d192ed03ULL));
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const { return static_cast<double>(at(counter) >> 11) * 0x1.0p-53; }

  static std::uint64_t mix(std::uint64_t z) {
    z += kGamma;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Seed for task `index` derived from a base seed.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) { return mix(seed ^ mix(index)); }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
};

}  // namespace normlab
