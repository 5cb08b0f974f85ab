#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dramforge/refinement.hpp"
#include "dramforge/simulation.hpp"

namespace dramforge {

struct PairwiseKs {
  int chain_a = 0;  // 1-based
  int chain_b = 0;
  int dimension = 0;  // 1-based
  double statistic = 0.0;
  double p_value = 1.0;
  double p_adjusted = 1.0;  // Bonferroni
};

struct ConvergenceReport {
  std::vector<PairwiseKs> tests;
  double significance = 0.05;
  /// True when any adjusted p-value falls below `significance`.
  bool flagged = false;
  std::vector<std::string> warnings;
};

/// Pairwise per-dimension two-sample KS tests between refined samples,
/// Bonferroni-corrected over all tests performed.
ConvergenceReport check_convergence(const std::vector<RefinedSample>& samples, int ndim, double significance = 0.05);

struct MultiChainOptions {
  RunOptions run;
  /// Stream of each chain; defaults to 1..n_chains.
  std::vector<std::uint64_t> streams;
  /// One target per chain (test fixtures); empty means the shared target.
  std::vector<const TargetDensity*> targets;
};

struct MultiChainOutputs {
  std::vector<SimulationOutputs> chains;
  ConvergenceReport convergence;
};

/// Output prefix of chain `index` (1-based).
std::string chain_prefix(const std::string& prefix, int index);

/// Runs n_chains independent samplers concurrently, each on its own stream
/// and prefix, then compares their refined samples. Writes
/// `<prefix>_convergence.txt`.
MultiChainOutputs run_multi_chain(const SimSpec& spec, const TargetDensity& target, int n_chains,
                                  const MultiChainOptions& options = {});

std::string format_convergence(const ConvergenceReport& report);

}  // namespace dramforge
