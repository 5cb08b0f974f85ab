#include "dramforge/proposal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace dramforge {

namespace {

constexpr int kMaxFactorizationRetries = 10;

Eigen::MatrixXd effective_covariance(const ProposalState& s) {
  return s.chol_lower * s.chol_lower.transpose();
}

// log det of an SPD matrix through its own Cholesky factor.
double log_det_spd(const Eigen::MatrixXd& m, Eigen::LLT<Eigen::MatrixXd>& llt) {
  llt.compute(m);
  if (llt.info() != Eigen::Success) throw NumericalError("covariance is not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();
  double total = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) total += std::log(l(i, i));
  return 2.0 * total;
}

}  // namespace

double regularization(const Eigen::MatrixXd& cov, double relative) noexcept {
  const double n = static_cast<double>(std::max<Eigen::Index>(cov.rows(), 1));
  return std::max(relative * cov.trace() / n, 1e-300);
}

ProposalState make_proposal(Eigen::VectorXd mean, Eigen::MatrixXd cov, double scale, double epsilon) {
  ProposalState s;
  s.mean = std::move(mean);
  s.cov = std::move(cov);
  s.scale = scale;
  s.epsilon = epsilon;
  return factorize(std::move(s));
}

ProposalState factorize(ProposalState state) {
  const auto n = state.mean.size();
  if (state.cov.rows() != n || state.cov.cols() != n) throw UsageError("proposal covariance has the wrong shape");
  if (!state.cov.allFinite()) throw NumericalError("proposal covariance contains non-finite entries");
  const Eigen::MatrixXd base = (state.scale * state.scale) * state.cov;
  for (int attempt = 0; attempt <= kMaxFactorizationRetries; ++attempt) {
    Eigen::MatrixXd m = base;
    m.diagonal().array() += state.epsilon;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() == Eigen::Success) {
      state.chol_lower = llt.matrixL();
      if (state.chol_lower.allFinite()) return state;
    }
    state.epsilon *= 2.0;
  }
  throw NumericalError("proposal covariance is not positive definite after " +
                       std::to_string(kMaxFactorizationRetries) + " regularization retries");
}

ProposalState update_mean_cov(ProposalState state, std::span<const WeightedPoint> batch,
                              std::optional<double> relative_epsilon) {
  const int n = state.ndim();
  std::int64_t batch_count = 0;
  Eigen::VectorXd batch_mean = Eigen::VectorXd::Zero(n);
  for (const auto& wp : batch) {
    if (wp.weight < 1) throw UsageError("proposal update weights must be >= 1");
    if (static_cast<int>(wp.point.size()) != n) throw UsageError("proposal update point has the wrong dimension");
    batch_count += wp.weight;
    for (int i = 0; i < n; ++i) batch_mean[i] += static_cast<double>(wp.weight) * wp.point[static_cast<std::size_t>(i)];
  }
  if (batch_count == 0) return state;
  batch_mean /= static_cast<double>(batch_count);

  // Scatter of the batch around its own mean (two-pass within the batch).
  Eigen::MatrixXd batch_scatter = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd d(n);
  for (const auto& wp : batch) {
    for (int i = 0; i < n; ++i) d[i] = wp.point[static_cast<std::size_t>(i)] - batch_mean[i];
    batch_scatter.noalias() += static_cast<double>(wp.weight) * (d * d.transpose());
  }

  // Pairwise merge of (count, mean, scatter) summaries.
  const double na = static_cast<double>(state.sample_count);
  const double nb = static_cast<double>(batch_count);
  const double total = na + nb;
  const Eigen::VectorXd delta = batch_mean - state.mean;
  Eigen::MatrixXd scatter = state.cov * na + batch_scatter;
  if (state.sample_count > 0) scatter.noalias() += (na * nb / total) * (delta * delta.transpose());
  state.mean = state.sample_count > 0 ? Eigen::VectorXd(state.mean + delta * (nb / total)) : batch_mean;
  state.cov = scatter / total;
  state.cov = 0.5 * (state.cov + state.cov.transpose()).eval();
  state.sample_count += batch_count;
  if (relative_epsilon) state.epsilon = regularization(state.cov, *relative_epsilon);
  return factorize(std::move(state));
}

double stage_factor(double dr_scale_factor, int stage) noexcept {
  double f = 1.0;
  for (int s = 0; s < stage; ++s) f *= dr_scale_factor;
  return f;
}

Point propose_with_deviates(const ProposalState& state, std::span<const double> center, double step_factor,
                            std::span<const double> z) {
  const int n = state.ndim();
  Point out(center.begin(), center.end());
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j <= i; ++j) acc += state.chol_lower(i, j) * z[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] += step_factor * acc;
  }
  return out;
}

Point propose(const ProposalState& state, std::span<const double> center, int dr_stage, double dr_scale_factor,
              RngState& rng) {
  thread_local std::vector<double> z;
  z.resize(static_cast<std::size_t>(state.ndim()));
  for (auto& zi : z) zi = rng_gauss(rng);
  return propose_with_deviates(state, center, stage_factor(dr_scale_factor, dr_stage), z);
}

double log_proposal_density(const ProposalState& state, std::span<const double> from, std::span<const double> to,
                            double step_factor) {
  const int n = state.ndim();
  thread_local std::vector<double> u;
  u.resize(static_cast<std::size_t>(n));
  double quad = 0.0;
  double log_diag = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = (to[static_cast<std::size_t>(i)] - from[static_cast<std::size_t>(i)]) / step_factor;
    for (int j = 0; j < i; ++j) r -= state.chol_lower(i, j) * u[static_cast<std::size_t>(j)];
    const double ui = r / state.chol_lower(i, i);
    u[static_cast<std::size_t>(i)] = ui;
    quad += ui * ui;
    log_diag += std::log(state.chol_lower(i, i));
  }
  const double dn = static_cast<double>(n);
  return -0.5 * quad - log_diag - dn * std::log(step_factor) - 0.5 * dn * std::log(2.0 * std::numbers::pi);
}

double adaptation_measure(const ProposalState& previous, const ProposalState& next) {
  if (previous.ndim() != next.ndim()) throw UsageError("adaptation measure needs proposals of equal dimension");
  // All three determinants go through the same code path so that identical
  // proposals give a Bhattacharyya coefficient of exactly one.
  const Eigen::MatrixXd s1 = effective_covariance(previous);
  const Eigen::MatrixXd s2 = effective_covariance(next);
  const Eigen::MatrixXd avg = 0.5 * (s1 + s2);
  Eigen::LLT<Eigen::MatrixXd> llt;
  const double ld1 = log_det_spd(s1, llt);
  const double ld2 = log_det_spd(s2, llt);
  double ld_avg = 0.0;
  try {
    ld_avg = log_det_spd(avg, llt);
  } catch (const NumericalError&) {
    throw NumericalError("adaptation measure: averaged proposal covariance is singular");
  }
  const Eigen::VectorXd delta = next.mean - previous.mean;
  const double maha = delta.dot(llt.solve(delta));
  const double log_bc = 0.25 * ld1 + 0.25 * ld2 - 0.5 * ld_avg - 0.125 * maha;
  // 1 - BC^2 == H^2 (2 - H^2) with H^2 = 1 - BC.
  const double one_minus_bc_sq = -std::expm1(2.0 * std::min(log_bc, 0.0));
  return std::clamp(std::sqrt(std::max(one_minus_bc_sq, 0.0)), 0.0, 1.0);
}

}  // namespace dramforge
