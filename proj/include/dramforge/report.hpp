#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dramforge/sim_spec.hpp"

namespace dramforge {

struct ParallelStats {
  Parallelism mode = Parallelism::single_chain;
  int num_workers = 1;
  /// Accepted fraction of every candidate evaluated by any rank.
  double measured_candidate_acceptance = 0.0;
  double fitted_p = 1.0;
  double fit_distance = 0.0;
  /// speedup[n - 1] = S(n).
  std::vector<double> speedup;
  int optimal_workers = 1;

  friend bool operator==(const ParallelStats&, const ParallelStats&) = default;
};

struct ReportStats {
  SimSpec spec;
  /// "running" while a simulation is in progress, "complete" afterwards.
  std::string status = "running";

  std::int64_t accepted_count = 0;
  double mean_accept_rate = 0.0;
  std::int64_t burnin_loc = 0;
  std::int64_t adaptation_count = 0;
  double final_adaptation_measure = 0.0;
  std::vector<double> iac_history;
  double ess = 0.0;
  std::int64_t refined_size = 0;
  std::uintmax_t compact_bytes = 0;
  std::uintmax_t verbose_bytes = 0;
  double size_ratio = 0.0;  // verbose / compact, ascii encoding

  std::optional<ParallelStats> parallel;

  /// Configuration text echoed verbatim (may be empty).
  std::string config_text;

  friend bool operator==(const ReportStats&, const ReportStats&) = default;
};

std::string format_report(const ReportStats& stats);
void write_report(const ReportStats& stats, const std::filesystem::path& path);

/// Parses a report. The spec echo is rebuilt field by field, including
/// which keys the user set.
ReportStats read_report(const std::filesystem::path& path);

/// Keys whose values differ between two specs, in canonical order.
std::vector<std::string> spec_differences(const SimSpec& a, const SimSpec& b);

}  // namespace dramforge
