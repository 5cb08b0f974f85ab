#include "dramforge/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dramforge {

double metropolis_log_alpha(double logf_current, double logf_proposed) noexcept {
  if (logf_proposed == -INFINITY) return -INFINITY;
  return std::min(0.0, logf_proposed - logf_current);
}

double log1m_exp(double log_alpha) noexcept {
  if (log_alpha >= 0.0) return -INFINITY;
  if (log_alpha > -0.6931471805599453) return std::log(-std::expm1(log_alpha));
  return std::log1p(-std::exp(log_alpha));
}

double dr_log_alpha2(double logf_x, double logf_y1, double logf_y2, double logq_y2_y1, double logq_x_y1) noexcept {
  if (logf_y2 == -INFINITY) return -INFINITY;
  const double numerator = logf_y2 + logq_y2_y1 + log1m_exp(metropolis_log_alpha(logf_y2, logf_y1));
  if (numerator == -INFINITY) return -INFINITY;
  const double denominator = logf_x + logq_x_y1 + log1m_exp(metropolis_log_alpha(logf_x, logf_y1));
  return std::min(0.0, numerator - denominator);
}

namespace {

// Acceptance of the last entry of `idx` given that all intermediate
// entries were rejected when proposed from idx[0].
double dr_recursive(const ProposalState& prop, double factor, std::span<const Point> path,
                    std::span<const double> logf, const std::vector<int>& idx) {
  const std::size_t k = idx.size() - 1;
  const auto at = [&](std::size_t i) { return static_cast<std::size_t>(idx[i]); };
  if (k == 1) return metropolis_log_alpha(logf[at(0)], logf[at(1)]);
  if (logf[at(k)] == -INFINITY) return -INFINITY;

  double numerator = logf[at(k)];
  double denominator = logf[at(0)];
  std::vector<int> forward{idx[0]};
  std::vector<int> backward{idx[k]};
  for (std::size_t i = 1; i < k; ++i) {
    const double step = stage_factor(factor, static_cast<int>(i) - 1);
    forward.push_back(idx[i]);
    backward.push_back(idx[k - i]);
    numerator += log_proposal_density(prop, path[at(k)], path[at(k - i)], step) +
                 log1m_exp(dr_recursive(prop, factor, path, logf, backward));
    if (numerator == -INFINITY) return -INFINITY;
    denominator += log_proposal_density(prop, path[at(0)], path[at(i)], step) +
                   log1m_exp(dr_recursive(prop, factor, path, logf, forward));
  }
  return std::min(0.0, numerator - denominator);
}

[[noreturn]] void nan_target(std::int64_t iteration) {
  throw NumericalError("target density returned NaN at iteration " + std::to_string(iteration));
}

}  // namespace

double delayed_rejection_log_alpha(const ProposalState& proposal, double dr_scale_factor,
                                   std::span<const Point> path, std::span<const double> logf) {
  if (path.size() < 2 || path.size() != logf.size())
    throw UsageError("delayed-rejection path needs at least two points with matching log-densities");
  std::vector<int> idx(path.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  return dr_recursive(proposal, dr_scale_factor, path, logf, idx);
}

Attempt attempt_move(const ProposalState& proposal, std::span<const double> x, double logf_x,
                     const TargetDensity& target, const SimSpec& spec, RngState& rng, std::int64_t iteration) {
  std::vector<Point> path;
  std::vector<double> logf;
  path.reserve(static_cast<std::size_t>(spec.dr_stage_count) + 2);
  path.emplace_back(x.begin(), x.end());
  logf.push_back(logf_x);

  Attempt out;
  for (int stage = 0; stage <= spec.dr_stage_count; ++stage) {
    Point y = propose(proposal, x, stage, spec.dr_scale_factor, rng);
    const double logf_y = target(y);
    if (std::isnan(logf_y)) nan_target(iteration);
    path.push_back(std::move(y));
    logf.push_back(logf_y);

    const double log_alpha = stage == 0 ? metropolis_log_alpha(logf_x, logf_y)
                                        : delayed_rejection_log_alpha(proposal, spec.dr_scale_factor, path, logf);
    const double u = rng_uniform(rng);
    out.stages_tried = stage + 1;
    out.stage = stage;
    if (std::log(u) < log_alpha) {
      out.accepted = true;
      out.state = std::move(path.back());
      out.logf = logf_y;
      return out;
    }
  }
  return out;
}

SamplerState init_sampler(const SimSpec& spec, const TargetDensity& target, std::span<const std::uint64_t> streams) {
  validate(spec);
  if (target.ndim() != spec.ndim)
    throw UsageError("target has " + std::to_string(target.ndim()) + " dimensions but ndim = " +
                     std::to_string(spec.ndim));
  if (streams.empty()) throw UsageError("sampler needs at least one random stream");

  SamplerState s;
  s.current = spec.start_point;
  s.current_logf = target(s.current);
  if (std::isnan(s.current_logf)) nan_target(1);
  if (s.current_logf == -INFINITY) throw UsageError("start point lies outside the support of the target");

  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(spec.ndim, spec.ndim);
  s.proposal = make_proposal(Eigen::Map<const Eigen::VectorXd>(spec.start_point.data(), spec.ndim), identity,
                             spec.proposal_scale, regularization(identity, spec.cov_epsilon));
  for (auto stream : streams) s.rngs.push_back(rng_new(spec.seed, stream));
  s.burnin = BurninTracker(spec.ndim);
  s.chain.ndim = spec.ndim;
  return s;
}

SamplerState init_sampler(const SimSpec& spec, const TargetDensity& target) {
  const std::uint64_t stream = 1;
  return init_sampler(spec, target, std::span(&stream, 1));
}

namespace {

ChainRow emit_live_row(SamplerState& s) {
  ChainRow row;
  row.process_id = s.current_process_id;
  row.dr_stage = s.current_stage;
  row.mean_accept_rate = static_cast<double>(s.accepted_count) / static_cast<double>(s.iteration);
  row.adaptation_measure = s.last_measure;
  row.weight = s.pending_weight;
  row.logf = s.current_logf;
  row.state = s.current;
  row.burnin_loc = s.burnin.push(row.logf);
  s.chain.rows.push_back(row);
  s.unabsorbed.emplace_back(row.state, row.weight);
  return row;
}

}  // namespace

std::optional<ChainRow> apply_verdict(SamplerState& s, const Attempt& attempt, std::int32_t rank,
                                      std::int64_t rejections_before) {
  s.pending_weight += rejections_before;
  s.iteration += rejections_before;
  if (!attempt.accepted) {
    ++s.pending_weight;
    ++s.iteration;
    return std::nullopt;
  }
  ChainRow row = emit_live_row(s);
  s.current = attempt.state;
  s.current_logf = attempt.logf;
  s.current_stage = attempt.stage;
  s.current_process_id = rank;
  s.pending_weight = 1;
  ++s.accepted_count;
  ++s.iteration;
  return row;
}

std::optional<ChainRow> step(SamplerState& s, const TargetDensity& target, const SimSpec& spec) {
  const Attempt attempt =
      attempt_move(s.proposal, s.current, s.current_logf, target, spec, s.rngs.front(), s.iteration + 1);
  return apply_verdict(s, attempt, 1, 0);
}

std::optional<AdaptationRecord> adapt_if_due(SamplerState& s, const SimSpec& spec) {
  if (s.iteration % spec.adaptation_period != 0 || s.iteration == s.iteration_at_adaptation) return std::nullopt;

  const bool greedy = s.proposal.adaptation_count < spec.greedy_adaptation_count;
  const auto min_rows = static_cast<std::size_t>(spec.ndim) + 1;
  if ((greedy || s.proposal.sample_count == 0) && s.unabsorbed.size() < min_rows) return std::nullopt;

  std::vector<WeightedPoint> batch;
  batch.reserve(s.unabsorbed.size());
  for (const auto& [point, weight] : s.unabsorbed) batch.push_back({point, greedy ? 1 : weight});

  ProposalState base = s.proposal;
  if (greedy) {
    base.sample_count = 0;
    base.mean = Eigen::VectorXd::Zero(spec.ndim);
    base.cov = Eigen::MatrixXd::Zero(spec.ndim, spec.ndim);
  }

  ProposalState next;
  try {
    next = update_mean_cov(std::move(base), batch, spec.cov_epsilon);
    if (spec.target_acceptance_window) {
      const double rate = static_cast<double>(s.accepted_count - s.accepted_at_adaptation) /
                          static_cast<double>(s.iteration - s.iteration_at_adaptation);
      const auto [lo, hi] = *spec.target_acceptance_window;
      if (rate < lo) next.scale *= 0.8;
      else if (rate > hi) next.scale *= 1.25;
      if (rate < lo || rate > hi) next = factorize(std::move(next));
    }
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(e.what()) + " (adaptation at iteration " + std::to_string(s.iteration) + ")");
  }
  next.adaptation_count = s.proposal.adaptation_count + 1;

  const double measure = adaptation_measure(s.proposal, next);
  s.proposal = std::move(next);
  s.last_measure = measure;
  s.unabsorbed.clear();
  s.iteration_at_adaptation = s.iteration;
  s.accepted_at_adaptation = s.accepted_count;
  AdaptationRecord record{s.iteration, measure};
  s.adaptation_history.push_back(record);
  return record;
}

ChainRow finalize_chain(SamplerState& s) { return emit_live_row(s); }

}  // namespace dramforge
