#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dramforge/sim_spec.hpp"
#include "dramforge/targets.hpp"

namespace dramforge {

/// A parsed run configuration: SimSpec keys at top level, then one
/// `[target]` section.
///
///     ndim = 2
///     chain_size = 20000
///     [target]
///     kind = gauss_mixture
///     weights = 0.5, 0.5
///     means = -2,0; 2,0
///     covariances = identity
///
/// Target keys: kind (mvn | rosenbrock | gauss_mixture); mvn: mean,
/// covariance (identity or ndim*ndim row-major reals); rosenbrock: scale;
/// gauss_mixture: weights, means and covariances with ';' between
/// components.
struct RunConfig {
  SimSpec spec;
  BuiltinTarget target = BuiltinTarget::standard_mvn(1);
  /// The configuration text as read, for the report echo.
  std::string text;
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Parses `text`; `source` names it in error messages. Overrides use the
/// same keys, with `target.` in front of target keys, and are applied after
/// the file. Errors are ParseError with the offending line (0 for overrides).
RunConfig parse_config(std::string_view text, const std::string& source, const Overrides& overrides = {});

RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});

/// Splits "key=value".
std::pair<std::string, std::string> parse_override(std::string_view assignment);

}  // namespace dramforge
