#pragma once

#include <cstdint>
#include <vector>

#include "dramforge/chain.hpp"

namespace dramforge {

/// Which rank supplied each accepted fork-join step.
struct ContributionStats {
  /// counts[k - 1] = accepted steps contributed by rank k.
  std::vector<std::int64_t> counts;
  /// Candidates of cycles in which no rank accepted (right-censored trials).
  std::int64_t censored_trials = 0;
  double fitted_p = 1.0;
  /// Total variation between the empirical rank distribution and the
  /// fitted geometric law truncated to ranks 1..counts.size().
  double fit_distance = 0.0;

  std::int64_t accepted_steps() const noexcept;
};

/// Histogram of process ids over rows 1..end (row 0 is the start point,
/// which no rank contributed). Censored trials are whatever iterations the
/// accepted steps do not account for.
ContributionStats contribution_from_chain(const CompactChain& chain, int num_workers);

/// Maximum-likelihood geometric fit with right censoring:
/// p = accepted / (sum_k k * count_k + censored_trials).
ContributionStats fit_geometric(ContributionStats stats);

/// S(n) = (1 - (1 - mu)^n) / mu.
double predict_speedup(double mu, int n);

/// Smallest n with 1 - (1 - mu)^n >= 0.99; 1 when mu == 1.
int optimal_num_workers(double mu);

struct SpeedupModel {
  double mu = 1.0;
  /// curve[n - 1] = S(n).
  std::vector<double> curve;
  int optimal_n = 1;
};

/// Curve for n = 1..max(2 * n*, num_workers).
SpeedupModel make_speedup_model(double mu, int num_workers);

struct ForkJoinSimulation {
  std::int64_t cycles = 0;
  std::int64_t serial_accepted = 0;
  std::int64_t parallel_accepted = 0;
  /// Accepted steps per cycle relative to one serial worker.
  double efficiency = 0.0;
};

/// Discrete-event model: every cycle each of `n` candidates is accepted
/// independently with probability `mu`; a serial worker gets one candidate
/// per cycle. Deterministic for a given seed.
ForkJoinSimulation simulate_fork_join(double mu, int n, std::int64_t cycles, std::uint64_t seed);

}  // namespace dramforge
