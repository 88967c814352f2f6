// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace xchan {

inline constexpr std::uint64_t default_seed = 20240601;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seedable 64-bit stream. Satisfies UniformRandomBitGenerator so it plugs
// into the <random> distributions.
class RandomStream {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit RandomStream(std::uint64_t seed = default_seed) : engine_(seed) {}

  // Independent child stream for task `index` of a run seeded with `seed`.
  static RandomStream derive(std::uint64_t seed, std::uint64_t index) {
    return RandomStream(splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
  }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace xchan
