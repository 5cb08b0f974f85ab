#pragma once

#include <cstdint>
#include <optional>

namespace dramforge {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

/// SplitMix64 state plus the spare Box-Muller deviate.
///
/// Every deviate the sampler consumes comes from one of these, so the
/// triple (state, stream_id, gauss_cache) is all a checkpoint needs to
/// reproduce the future of a chain.
struct RngState {
  std::uint64_t state = 0;
  std::uint64_t stream_id = 0;
  std::optional<double> gauss_cache;

  friend bool operator==(const RngState&, const RngState&) = default;
};

/// Advances `state` by one SplitMix64 step and returns the mixed output.
inline std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += kGoldenGamma);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

RngState rng_new(std::uint64_t seed, std::uint64_t stream_id);

/// Uniform deviate in [0, 1): the top 53 bits of the next output over 2^53.
double rng_uniform(RngState& rng) noexcept;

/// Standard normal deviate via Box-Muller. Draws two uniforms on every
/// other call and hands out the cached sine branch on the calls between.
double rng_gauss(RngState& rng) noexcept;

}  // namespace dramforge
