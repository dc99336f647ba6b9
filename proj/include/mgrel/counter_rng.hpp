#pragma once

#include <cstddef>
#include <cstdint>

namespace mgrel {

// Counter-based uniform source. Every variate is a pure function of
// (seed, year, day, stream), so a year can be simulated on any worker in any
// order and still see exactly the same numbers.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) noexcept : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  // Uniform variate in the open interval (0, 1).
  constexpr double uniform(std::uint64_t year, std::uint64_t day, std::uint64_t stream) const noexcept {
    std::uint64_t h = mix(key_ + year * 0x9e3779b97f4a7c15ULL);
    h = mix(h ^ (day * 0xbf58476d1ce4e5b9ULL + 0x3c6ef372fe94f82bULL));
    h = mix(h + stream * 0x94d049bb133111ebULL + 0xa54ff53a5f1d36f1ULL);
    // 52 high bits, centred in their cell; (2^52 - 0.5) is still exact, so
    // neither 0 nor 1 can come out.
    return (static_cast<double>(h >> 12) + 0.5) * 0x1.0p-52;
  }

  // SplitMix64 finalizer.
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
};

// Stream numbering. Wind draws are keyed by region index; irradiance draws are
// keyed either by a single shared stream or by PV array index. Keys depend
// only on the region/array position, so appending a unit to a fleet leaves
// every existing unit's draws unchanged.
inline constexpr std::uint64_t wind_stream(std::size_t region_index) noexcept { return region_index; }
inline constexpr std::uint64_t kSharedIrradianceStream = 0x10000;
inline constexpr std::uint64_t irradiance_stream(std::size_t array_index) noexcept {
  return kSharedIrradianceStream + 1 + array_index;
}

}  // namespace mgrel
