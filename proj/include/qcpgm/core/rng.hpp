#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qcpgm::core {

/// FNV-1a hash, used to turn stream labels into substream keys.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Deterministic RNG substream. Identical (seed, tag, a, b) keys yield an
/// identical engine regardless of thread schedule, which keeps parallel
/// event generation reproducible.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t tag, std::uint64_t a = 0,
                                 std::uint64_t b = 0) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(tag),  static_cast<std::uint32_t>(tag >> 32),
      static_cast<std::uint32_t>(a),    static_cast<std::uint32_t>(a >> 32),
      static_cast<std::uint32_t>(b),    static_cast<std::uint32_t>(b >> 32),
  };
  return std::mt19937_64(seq);
}

/// Uniform double in [0, 1) with exactly 53 random bits; identical output on
/// every platform for a given engine state.
inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace qcpgm::core
