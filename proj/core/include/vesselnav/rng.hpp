#pragma once

#include <cstdint>

namespace vesselnav {

/// SplitMix64 finalizer; a stateless 64-bit mixing function.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Child seed for stream `index` of a master seed. Streams never overlap in
/// practice and do not depend on evaluation order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index + 0x632BE59BD9B4E019ull));
}

/// Maps a 64-bit hash onto [0, 1) using its top 53 bits.
constexpr double unit_interval(std::uint64_t h) noexcept {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace vesselnav
