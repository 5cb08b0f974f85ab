#include "dramforge/rng.hpp"

#include <cmath>
#include <numbers>

namespace dramforge {

RngState rng_new(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t mixed = seed ^ (stream_id * kGoldenGamma);
  RngState rng;
  rng.state = splitmix64_next(mixed);
  rng.stream_id = stream_id;
  return rng;
}

double rng_uniform(RngState& rng) noexcept {
  constexpr double kTwoPowMinus53 = 0x1.0p-53;
  return static_cast<double>(splitmix64_next(rng.state) >> 11) * kTwoPowMinus53;
}

double rng_gauss(RngState& rng) noexcept {
  if (rng.gauss_cache) {
    const double cached = *rng.gauss_cache;
    rng.gauss_cache.reset();
    return cached;
  }
  // 1 - u lies in (0, 1], so the logarithm is always finite.
  const double u1 = 1.0 - rng_uniform(rng);
  const double u2 = rng_uniform(rng);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  rng.gauss_cache = radius * std::sin(angle);
  return radius * std::cos(angle);
}

}  // namespace dramforge
