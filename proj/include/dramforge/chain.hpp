#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dramforge/core.hpp"

namespace dramforge {

/// One unique state of the compact chain.
struct ChainRow {
  std::int32_t process_id = 1;  // contributing worker rank, 1-based
  std::int32_t dr_stage = 0;    // stage at which the state was accepted
  double mean_accept_rate = 0.0;
  double adaptation_measure = 0.0;
  std::int64_t burnin_loc = 0;
  std::int64_t weight = 1;  // repeat count in the verbose chain
  double logf = 0.0;
  Point state;

  friend bool operator==(const ChainRow&, const ChainRow&) = default;
};

/// Weighted sequence of accepted states.
struct CompactChain {
  int ndim = 0;
  std::vector<ChainRow> rows;

  std::int64_t total_weight() const noexcept;

  friend bool operator==(const CompactChain&, const CompactChain&) = default;
};

/// Column names in file order: seven metadata columns, then one per dimension.
std::vector<std::string> chain_header(int ndim);

/// Running burn-in estimate: the smallest row index whose logf is at least
/// (max logf so far) - ndim/2. The threshold only rises, so the index only
/// moves forward and each push is amortized O(1).
class BurninTracker {
 public:
  explicit BurninTracker(int ndim) : half_ndim_(0.5 * ndim) {}

  /// Registers the next row and returns the current estimate.
  std::int64_t push(double logf);
  std::int64_t location() const noexcept { return location_; }
  std::int64_t size() const noexcept { return static_cast<std::int64_t>(logf_.size()); }

 private:
  double half_ndim_;
  double max_logf_ = -INFINITY;
  std::int64_t location_ = 0;
  std::vector<double> logf_;
};

/// Burn-in location of a complete chain (same rule as BurninTracker).
std::int64_t detect_burnin(const CompactChain& chain, int ndim);

/// Verbose expansion of one coordinate (or of logf when coord < 0),
/// starting at compact row `first_row`.
std::vector<double> expand_column(const CompactChain& chain, int coord, std::int64_t first_row = 0);

/// Merges consecutive rows that agree in every column except the weight,
/// summing their weights. Turns a verbose chain back into a compact one.
CompactChain recompact(const CompactChain& chain);

}  // namespace dramforge
