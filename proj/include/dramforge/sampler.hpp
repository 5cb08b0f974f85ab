#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dramforge/chain.hpp"
#include "dramforge/core.hpp"
#include "dramforge/proposal.hpp"
#include "dramforge/rng.hpp"
#include "dramforge/sim_spec.hpp"

namespace dramforge {

/// Live Markov chain state plus everything emitted so far.
///
/// Invariants: iteration == chain.total_weight() + pending_weight, and
/// accepted_count == chain.rows.size() + 1 (the live row counts as one
/// accepted state, starting with the start point).
struct SamplerState {
  Point current;
  double current_logf = 0.0;
  std::int32_t current_stage = 0;
  std::int32_t current_process_id = 1;
  std::int64_t iteration = 1;
  std::int64_t accepted_count = 1;
  std::int64_t pending_weight = 1;

  ProposalState proposal;
  /// One generator per rank; serial runs use rngs[0].
  std::vector<RngState> rngs;

  double last_measure = 0.0;
  std::vector<AdaptationRecord> adaptation_history;
  /// Rows emitted since the last adaptation, waiting to be absorbed.
  std::vector<std::pair<Point, std::int64_t>> unabsorbed;
  std::int64_t iteration_at_adaptation = 1;
  std::int64_t accepted_at_adaptation = 1;

  BurninTracker burnin{1};
  CompactChain chain;
};

/// Outcome of one full delayed-rejection attempt sequence from a state.
struct Attempt {
  bool accepted = false;
  std::int32_t stage = 0;  // stage of acceptance, or the last stage tried
  Point state;
  double logf = -INFINITY;
  int stages_tried = 0;
};

/// min(0, logf_proposed - logf_current).
double metropolis_log_alpha(double logf_current, double logf_proposed) noexcept;

/// log(1 - exp(log_alpha)), -inf when log_alpha == 0.
double log1m_exp(double log_alpha) noexcept;

/// Second-stage delayed-rejection log acceptance probability:
/// min(0, [f(y2) + q(y2->y1) + log(1 - a1(y2,y1))] - [f(x) + q(x->y1) + log(1 - a1(x,y1))]).
double dr_log_alpha2(double logf_x, double logf_y1, double logf_y2, double logq_y2_y1, double logq_x_y1) noexcept;

/// Log acceptance probability of the last point of `path` (x, y1, ..., yk)
/// through the general delayed-rejection recursion. Stage i proposes from
/// the path start with step factor dr_scale_factor^i, so the kernel of the
/// final stage is symmetric and cancels.
double delayed_rejection_log_alpha(const ProposalState& proposal, double dr_scale_factor,
                                   std::span<const Point> path, std::span<const double> logf);

/// Runs stage 0 and up to spec.dr_stage_count delayed-rejection stages
/// from `x`. Each stage consumes ndim Gaussian deviates and one uniform,
/// whatever its outcome. `iteration` only labels error messages.
Attempt attempt_move(const ProposalState& proposal, std::span<const double> x, double logf_x,
                     const TargetDensity& target, const SimSpec& spec, RngState& rng, std::int64_t iteration);

/// Fresh state at spec.start_point, one generator per entry of `streams`.
SamplerState init_sampler(const SimSpec& spec, const TargetDensity& target, std::span<const std::uint64_t> streams);

/// Serial initialization: a single generator on stream 1.
SamplerState init_sampler(const SimSpec& spec, const TargetDensity& target);

/// Applies a verdict reached after `rejections_before` failed candidates.
/// On acceptance, emits the previous live row with its weight and makes
/// the attempt's state the new live row, credited to `rank`.
std::optional<ChainRow> apply_verdict(SamplerState& state, const Attempt& attempt, std::int32_t rank,
                                      std::int64_t rejections_before);

/// One serial iteration using rngs[0]. Returns the emitted row, if any.
std::optional<ChainRow> step(SamplerState& state, const TargetDensity& target, const SimSpec& spec);

/// Adapts the proposal when iteration is a multiple of adaptation_period.
///
/// Absorbs the rows emitted since the last adaptation. While
/// greedy_adaptation_count adaptations have not happened yet, only those
/// new rows (unit weights) define the proposal. The very first adaptation
/// is deferred until at least ndim + 1 rows are available so that the
/// sample covariance can have full rank. Returns the new record when an
/// adaptation took place.
std::optional<AdaptationRecord> adapt_if_due(SamplerState& state, const SimSpec& spec);

/// Emits the live row. Call once, when iteration == chain_size.
ChainRow finalize_chain(SamplerState& state);

}  // namespace dramforge
