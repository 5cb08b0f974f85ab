#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dramforge/chain.hpp"

namespace dramforge {

/// Decorrelated, unweighted sample obtained by recursive thinning.
struct RefinedSample {
  std::vector<Point> states;
  std::vector<double> logf;
  /// Integrated autocorrelation time measured at each pass.
  std::vector<double> iac_history;
  std::int64_t source_burnin = 0;
};

inline constexpr double kRefinementTolerance = 1.05;
inline constexpr std::size_t kRefinementMinSize = 10;
/// A pass also stops once lags 1..kWhiteNoiseLags of every series lie
/// within +-kWhiteNoiseBand / sqrt(n): the tau estimate of a finite white
/// noise series routinely exceeds kRefinementTolerance, and thinning on
/// that noise alone would shrink the sample to nothing.
inline constexpr std::size_t kWhiteNoiseLags = 10;
inline constexpr double kWhiteNoiseBand = 3.0;
/// Longest lag examined when estimating an autocorrelation time.
inline constexpr std::size_t kMaxAcfLag = 20000;

/// Autocorrelation rho(0..max_lag) of the series in which values[i] is
/// repeated weights[i] times, computed from the runs without expanding them.
/// A constant series yields rho(k) = 0 for k >= 1.
std::vector<double> weighted_acf(std::span<const double> values, std::span<const std::int64_t> weights,
                                 std::size_t max_lag);

/// Autocorrelation of a plain series.
std::vector<double> acf(std::span<const double> series, std::size_t max_lag);

/// tau = 1 + 2 * sum of rho(k) for k = 1 up to the lag before the first
/// non-positive value; floored at 1.
double integrated_autocorrelation(std::span<const double> acf);

/// tau of a plain series. Lags are evaluated in blocks until the
/// autocorrelation stops being positive (at most kMaxAcfLag).
double integrated_autocorrelation_time(std::span<const double> series);

/// tau of a run-length weighted series, same truncation rule.
double integrated_autocorrelation_time(std::span<const double> values, std::span<const std::int64_t> weights);

/// Keeps elements 0, stride, 2*stride, ...
std::vector<double> thin(std::span<const double> series, std::size_t stride);

/// Drops rows before `burnin`, expands the weights, then repeatedly
/// measures tau (maximum over all coordinates and logf) and thins by
/// ceil(tau) until tau <= kRefinementTolerance, the series look like white
/// noise, or fewer than kRefinementMinSize elements remain.
RefinedSample refine(const CompactChain& chain, std::int64_t burnin);

/// Post-burn-in verbose length divided by the first-pass tau.
double effective_sample_size(const CompactChain& chain, std::int64_t burnin);

/// Chain with unit weights holding a refined sample (for re-refinement and IO).
CompactChain as_chain(const RefinedSample& sample, int ndim);

}  // namespace dramforge
