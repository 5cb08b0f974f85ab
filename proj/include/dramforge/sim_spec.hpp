#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dramforge/core.hpp"

namespace dramforge {

enum class ChainFormat { compact, verbose };
enum class FileEncoding { ascii, binary };
enum class Parallelism { none, single_chain, multi_chain };

std::string_view to_string(ChainFormat f) noexcept;
std::string_view to_string(FileEncoding e) noexcept;
std::string_view to_string(Parallelism p) noexcept;

/// Full settings of one simulation.
///
/// Build one with `SimSpec::defaults(ndim)` and then override fields;
/// the defaults for `start_point`, `proposal_scale` and
/// `adaptation_period` depend on the dimension.
struct SimSpec {
  int ndim = 1;
  /// Total iterations, i.e. the sum of all chain weights.
  std::int64_t chain_size = 100000;
  Point start_point;
  std::uint64_t seed = 1;
  std::string output_prefix = "dramforge";
  ChainFormat chain_format = ChainFormat::compact;
  FileEncoding file_encoding = FileEncoding::ascii;
  std::int64_t adaptation_period = 100;
  int greedy_adaptation_count = 0;
  int dr_stage_count = 1;
  double dr_scale_factor = 0.5;
  double proposal_scale = 2.38;
  /// Relative regularization: the absolute epsilon added to the proposal
  /// covariance diagonal is cov_epsilon * trace(cov) / ndim, floored at 1e-300.
  double cov_epsilon = 1e-12;
  Parallelism parallelism = Parallelism::none;
  int num_workers = 1;
  std::optional<std::pair<double, double>> target_acceptance_window;

  /// Keys the user set explicitly; everything else is reported as a default.
  std::set<std::string> user_keys;

  static SimSpec defaults(int ndim);

  friend bool operator==(const SimSpec&, const SimSpec&) = default;
};

inline constexpr int kMaxDelayedRejectionStages = 2;

/// Keys in canonical (report) order.
const std::vector<std::string>& spec_keys();

std::string format_spec_value(const SimSpec& spec, std::string_view key);

/// Parses `value` into the field named `key`. Throws UsageError on an
/// unknown key or a malformed value. Does not touch `user_keys`.
void set_spec_value(SimSpec& spec, std::string_view key, std::string_view value);

struct SpecViolation {
  std::string key;
  std::string message;
};

std::optional<SpecViolation> find_violation(const SimSpec& spec);

/// Throws UsageError naming the offending key.
void validate(const SimSpec& spec);

/// Builds a spec from key=value assignments: ndim first, dimension-dependent
/// defaults next, then every assignment in order (later ones win). All
/// assigned keys are recorded as user-set.
SimSpec build_spec(const std::vector<std::pair<std::string, std::string>>& assignments);

}  // namespace dramforge
