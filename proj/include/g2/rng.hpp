#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace g2::rng {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derive a child key from a parent key and a counter.
constexpr std::uint64_t derive(std::uint64_t parent, std::uint64_t counter) {
  return mix64(parent ^ mix64(counter + 0x632be59bd9b4e019ULL));
}

/// Uniform in the open interval (0, 1) with 53 random bits.
inline double uniform_open(std::uint64_t key) {
  return (static_cast<double>(mix64(key) >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal deviate addressed by a 64-bit key (Box-Muller on two
/// uniforms derived from the key).
inline double normal(std::uint64_t key) {
  const double u1 = uniform_open(derive(key, 1));
  const double u2 = uniform_open(derive(key, 2));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace g2::rng
