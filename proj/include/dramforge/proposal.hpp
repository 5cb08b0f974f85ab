#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include <Eigen/Dense>

#include "dramforge/core.hpp"
#include "dramforge/rng.hpp"

namespace dramforge {

/// Adaptive Gaussian random-walk proposal.
///
/// `mean` and `cov` are the weighted sample statistics of every chain state
/// absorbed so far (population normalization, 1/n). The proposal used for
/// a step is N(center, scale^2 * cov + epsilon * I), represented by its
/// lower Cholesky factor.
struct ProposalState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  Eigen::MatrixXd chol_lower;
  double scale = 1.0;
  double epsilon = 1e-12;
  std::int64_t sample_count = 0;
  std::int64_t adaptation_count = 0;

  int ndim() const noexcept { return static_cast<int>(mean.size()); }
};

struct WeightedPoint {
  std::span<const double> point;
  std::int64_t weight = 1;
};

struct AdaptationRecord {
  std::int64_t iteration = 0;
  double measure = 0.0;

  friend bool operator==(const AdaptationRecord&, const AdaptationRecord&) = default;
};

/// Proposal with the given statistics, already factorized.
ProposalState make_proposal(Eigen::VectorXd mean, Eigen::MatrixXd cov, double scale, double epsilon);

/// Regularization for `cov`: relative * trace(cov) / ndim, floored at 1e-300.
double regularization(const Eigen::MatrixXd& cov, double relative) noexcept;

/// Cholesky of scale^2 * cov + epsilon * I. When that is not positive
/// definite epsilon is doubled and the factorization retried, up to 10
/// times; afterwards a NumericalError is thrown.
ProposalState factorize(ProposalState state);

/// Merges a weighted batch into the running mean and covariance and
/// refreshes the factor. When `relative_epsilon` is given, epsilon is
/// recomputed from the merged covariance first.
ProposalState update_mean_cov(ProposalState state, std::span<const WeightedPoint> batch,
                              std::optional<double> relative_epsilon = std::nullopt);

/// Step-size multiplier of a delayed-rejection stage: factor^stage.
double stage_factor(double dr_scale_factor, int stage) noexcept;

/// center + step_factor * L * z for a caller-supplied z.
Point propose_with_deviates(const ProposalState& state, std::span<const double> center, double step_factor,
                            std::span<const double> z);

/// Draws exactly ndim Gaussian deviates (coordinate order) and returns
/// center + dr_scale_factor^stage * L * z.
Point propose(const ProposalState& state, std::span<const double> center, int dr_stage, double dr_scale_factor,
              RngState& rng);

/// Log density of proposing `to` from `from` with the given step factor.
double log_proposal_density(const ProposalState& state, std::span<const double> from, std::span<const double> to,
                            double step_factor);

/// Upper bound on the total variation distance between the effective
/// Gaussians N(mean, scale^2 cov + eps I) of two proposals:
/// sqrt(H^2 (2 - H^2)) with H^2 the squared Hellinger distance. In [0, 1].
double adaptation_measure(const ProposalState& previous, const ProposalState& next);

}  // namespace dramforge
