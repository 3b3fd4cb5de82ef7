#pragma once

// Seeding and random-number primitives shared by every module.
//
// All randomness in the library derives from a 64-bit master seed through
// the functions below. The constants are part of the reproducibility
// contract: changing any of them changes every output.

#include <array>
#include <bit>
#include <cstdint>
#include <limits>

namespace rwrs {

/// SplitMix64 finalizer (Steele, Lea & Flood). Bijective avalanche mix.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// Seed of replica `replica` under `master`:
///   mix64(mix64(master) ^ (replica * 0x9e3779b97f4a7c15 + 0x632be59bd9b4e019)).
constexpr std::uint64_t replica_seed(std::uint64_t master, std::uint64_t replica) noexcept {
  return mix64(mix64(master) ^ (replica * kGolden + 0x632be59bd9b4e019ULL));
}

/// Independent sub-stream of a seed, e.g. walk vs scenery of one replica:
///   mix64(seed + (stream + 1) * 0x9e3779b97f4a7c15).
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(seed + (stream + 1) * kGolden);
}

/// Sub-stream ids used inside a replica.
inline constexpr std::uint64_t kWalkStream = 0;
inline constexpr std::uint64_t kSceneryStream = 1;

/// Counter-based key for a lattice site:
///   mix64(mix64(seed) ^ mix64(site as uint64 + 0xd1b54a32d192ed03)).
constexpr std::uint64_t site_key(std::uint64_t seed, std::int64_t site) noexcept {
  return mix64(mix64(seed) ^ mix64(static_cast<std::uint64_t>(site) + 0xd1b54a32d192ed03ULL));
}

/// Top 52 bits to a double in the open interval (0, 1). With 53 bits the
/// largest value would round up to exactly 1.
constexpr double to_open_unit(std::uint64_t x) noexcept {
  return (static_cast<double>(x >> 12) + 0.5) * 0x1.0p-52;
}

/// Top 53 bits to a double in [0, 1).
constexpr double to_unit(std::uint64_t x) noexcept {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// xoshiro256** 1.0 (Blackman & Vigna), state filled by SplitMix64 from the seed.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) noexcept {
    std::uint64_t z = seed;
    for (auto& s : state_) {
      z += kGolden;
      s = mix64(z);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = std::rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = std::rotl(state_[3], 45);
    return result;
  }

  double uniform() noexcept { return to_open_unit((*this)()); }

 private:
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace rwrs
