#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace dramforge {

enum class Export { stats, acf, covmat, contrib };

std::optional<Export> parse_export(std::string_view name) noexcept;
std::string_view to_string(Export e) noexcept;

struct ExportFiles {
  std::filesystem::path csv;
  std::filesystem::path script;  // gnuplot
};

/// Writes `<prefix>_<what>.csv` and a gnuplot script next to it, computed
/// only from the output files of `prefix`:
///   stats   - acceptance, burn-in, tau per refinement pass, ESS
///   acf     - lag versus autocorrelation of the chain and of the refined sample
///   covmat  - one row per restart checkpoint with the covariance entries
///   contrib - per-rank accepted steps against the fitted geometric law
ExportFiles export_postproc(const std::string& prefix, Export what);

}  // namespace dramforge
