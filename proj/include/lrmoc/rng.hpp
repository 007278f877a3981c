#pragma once

#include <cstdint>
#include <random>

namespace lrmoc {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent stream keys.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t combine_keys(std::uint64_t a, std::uint64_t b) { return mix64(a ^ mix64(b)); }

/// Random stream for one trajectory, keyed by (base seed, grid point key, trajectory index).
/// Streams for different keys are independent; any trajectory can be replayed in isolation.
inline Rng make_stream(std::uint64_t base_seed, std::uint64_t point_key, std::uint64_t trajectory) {
  std::uint64_t key = combine_keys(combine_keys(base_seed, point_key), trajectory);
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(mix64(key)), static_cast<std::uint32_t>(mix64(key) >> 32)};
  return Rng(seq);
}

/// Uniform double in [0, 1) with 53 random bits; independent of the standard
/// library's distribution implementations so streams are portable.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(rng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

inline bool random_bit(Rng& rng) { return (rng() >> 63) != 0; }

}  // namespace lrmoc
