#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "dramforge/core.hpp"
#include "dramforge/rng.hpp"
#include "dramforge/sim_spec.hpp"

namespace dramforge {

/// Everything needed to continue a chain bit-for-bit from an adaptation
/// event. The Cholesky factor is not stored: it is a deterministic function
/// of (cov, scale, epsilon) and is recomputed on load.
struct RestartCheckpoint {
  std::int64_t checkpoint_index = 0;
  std::int64_t iteration = 1;
  std::int64_t rows_emitted = 0;
  std::int64_t accepted_count = 1;
  std::int64_t pending_weight = 1;
  double current_logf = 0.0;
  std::int32_t current_dr_stage = 0;
  std::int32_t current_process_id = 1;
  double adaptation_measure = 0.0;

  Eigen::VectorXd proposal_mean;
  Eigen::MatrixXd proposal_cov;  // full symmetric matrix; files keep the upper triangle
  double proposal_scale = 1.0;
  double proposal_epsilon = 0.0;
  std::int64_t proposal_sample_count = 0;
  std::int64_t proposal_adaptation_count = 0;

  Point current_state;
  /// One generator per rank (a single entry for serial runs).
  std::vector<RngState> rngs;

  friend bool operator==(const RestartCheckpoint& a, const RestartCheckpoint& b);
};

bool operator==(const RestartCheckpoint& a, const RestartCheckpoint& b);

struct RestartFile {
  int ndim = 0;
  std::vector<RestartCheckpoint> checkpoints;
  /// True when a trailing record was incomplete and dropped.
  bool truncated = false;
};

/// Starts a restart file with its header, replacing any existing file.
void create_restart_file(const std::filesystem::path& path, int ndim, int num_ranks, FileEncoding encoding);

/// Appends one record and flushes it to the OS before returning.
void write_restart_checkpoint(const RestartCheckpoint& ckpt, const std::filesystem::path& path,
                              FileEncoding encoding);

/// Reads every complete record; the encoding is detected from the magic bytes.
RestartFile read_restart(const std::filesystem::path& path);

/// Rewrites the file so that it holds exactly `checkpoints`.
void rewrite_restart_file(const std::filesystem::path& path, int ndim,
                          const std::vector<RestartCheckpoint>& checkpoints, FileEncoding encoding);

}  // namespace dramforge
