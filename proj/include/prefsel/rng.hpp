#pragma once

#include <cstdint>
#include <random>

namespace prefsel {

// std::mt19937_64's output sequence is fixed by the standard; the std
// distributions are not, so bounded draws are done here to keep traces and
// bandit decisions identical across standard libraries.
using Rng = std::mt19937_64;

// Derives an independent seed for a named stochastic component.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  // Lemire's multiply-shift with rejection.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = rng();
    const unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
    if (static_cast<std::uint64_t>(m) >= threshold) {
      return static_cast<std::uint64_t>(m >> 64);
    }
  }
}

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace seed_stream {
inline constexpr std::uint64_t kPattern = 1;
inline constexpr std::uint64_t kInterleave = 2;
inline constexpr std::uint64_t kBandit = 3;
}  // namespace seed_stream

}  // namespace prefsel
