#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dramforge/chain.hpp"
#include "dramforge/chain_io.hpp"
#include "dramforge/checkpoint.hpp"
#include "dramforge/contribution.hpp"
#include "dramforge/core.hpp"
#include "dramforge/refinement.hpp"
#include "dramforge/report.hpp"
#include "dramforge/sampler.hpp"
#include "dramforge/sim_spec.hpp"

namespace dramforge {

struct RunOptions {
  /// Continue incomplete outputs instead of refusing to start.
  bool allow_resume = true;
  /// Discard existing outputs (complete or not) and start over.
  bool force = false;
  /// Simulated kill: stop as soon as the iteration counter reaches this
  /// value, leaving unflushed rows unwritten.
  std::optional<std::int64_t> interrupt_at_iteration;
  /// Random streams, one per rank. Defaults to 1..ranks.
  std::vector<std::uint64_t> streams;
  /// Echoed verbatim into the report.
  std::string config_text;
};

enum class OutputState { absent, incomplete, complete };

/// Inspects the files of spec.output_prefix.
OutputState inspect_outputs(const SimSpec& spec);

struct SimulationOutputs {
  CompactChain chain;
  RefinedSample refined;
  ReportStats report;
  OutputPaths paths;
  std::vector<AdaptationRecord> adaptation_history;
  std::optional<ContributionStats> contribution;
  bool complete = false;
  bool resumed = false;
};

/// Runs a serial or fork-join simulation to completion and writes every
/// output file. Existing complete outputs are refused unless `force`;
/// incomplete ones are resumed when `allow_resume`, refused otherwise.
SimulationOutputs run_sampler(const SimSpec& spec, const TargetDensity& target, const RunOptions& options = {});

/// Continues an interrupted simulation from its latest usable checkpoint.
SimulationOutputs resume(const SimSpec& spec, const TargetDensity& target, const RunOptions& options = {});

/// Builds the checkpoint describing `state` right after an adaptation event.
RestartCheckpoint make_checkpoint(const SamplerState& state, std::int64_t index);

/// Sampler state reconstructed from a checkpoint and the rows it covers.
SamplerState restore_sampler(const RestartCheckpoint& ckpt, const CompactChain& rows, int ndim);

}  // namespace dramforge
