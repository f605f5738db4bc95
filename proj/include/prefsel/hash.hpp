#pragma once

#include <cstdint>

namespace prefsel {

// Folds a 64-bit value into `width` bits: the value is cut into ceil(64/width)
// chunks, low to high, and the chunks are XORed together.
constexpr std::uint64_t pc_hash(std::uint64_t value, unsigned width) {
  if (width >= 64) return value;
  if (width == 0) return 0;
  const std::uint64_t mask = (std::uint64_t{1} << width) - 1;
  std::uint64_t folded = 0;
  while (value != 0) {
    folded ^= value & mask;
    value >>= width;
  }
  return folded;
}

// FNV-1a, used for trace and config digests.
constexpr std::uint64_t fnv1a(const char* data, std::size_t len,
                              std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (std::size_t i = 0; i < len; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr unsigned log2_exact(std::uint64_t v) {
  unsigned n = 0;
  while (v > 1) {
    v >>= 1;
    ++n;
  }
  return n;
}

constexpr bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

}  // namespace prefsel
