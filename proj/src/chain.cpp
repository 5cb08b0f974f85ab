#include "dramforge/chain.hpp"

#include <algorithm>

namespace dramforge {

std::int64_t CompactChain::total_weight() const noexcept {
  std::int64_t total = 0;
  for (const auto& r : rows) total += r.weight;
  return total;
}

std::vector<std::string> chain_header(int ndim) {
  std::vector<std::string> h = {"ProcessID",      "DelayedRejectionStage", "MeanAcceptanceRate", "AdaptationMeasure",
                                "BurninLocation", "SampleWeight",          "SampleLogFunc"};
  for (int i = 1; i <= ndim; ++i) h.push_back("SampleVariable" + std::to_string(i));
  return h;
}

std::int64_t BurninTracker::push(double logf) {
  logf_.push_back(logf);
  if (logf > max_logf_) {
    max_logf_ = logf;
    const double threshold = max_logf_ - half_ndim_;
    while (logf_[static_cast<std::size_t>(location_)] < threshold) ++location_;
  }
  return location_;
}

std::int64_t detect_burnin(const CompactChain& chain, int ndim) {
  if (chain.rows.empty()) throw UsageError("burn-in detection needs a nonempty chain");
  double max_logf = -INFINITY;
  for (const auto& r : chain.rows) max_logf = std::max(max_logf, r.logf);
  const double threshold = max_logf - 0.5 * ndim;
  for (std::size_t i = 0; i < chain.rows.size(); ++i)
    if (chain.rows[i].logf >= threshold) return static_cast<std::int64_t>(i);
  return 0;
}

std::vector<double> expand_column(const CompactChain& chain, int coord, std::int64_t first_row) {
  std::vector<double> out;
  std::int64_t n = 0;
  for (std::size_t i = static_cast<std::size_t>(std::max<std::int64_t>(first_row, 0)); i < chain.rows.size(); ++i)
    n += chain.rows[i].weight;
  out.reserve(static_cast<std::size_t>(n));
  for (std::size_t i = static_cast<std::size_t>(std::max<std::int64_t>(first_row, 0)); i < chain.rows.size(); ++i) {
    const auto& r = chain.rows[i];
    const double v = coord < 0 ? r.logf : r.state[static_cast<std::size_t>(coord)];
    out.insert(out.end(), static_cast<std::size_t>(r.weight), v);
  }
  return out;
}

CompactChain recompact(const CompactChain& chain) {
  CompactChain out;
  out.ndim = chain.ndim;
  for (const auto& r : chain.rows) {
    if (!out.rows.empty()) {
      auto& last = out.rows.back();
      if (last.process_id == r.process_id && last.dr_stage == r.dr_stage &&
          last.mean_accept_rate == r.mean_accept_rate && last.adaptation_measure == r.adaptation_measure &&
          last.burnin_loc == r.burnin_loc && last.logf == r.logf && last.state == r.state) {
        last.weight += r.weight;
        continue;
      }
    }
    out.rows.push_back(r);
  }
  return out;
}

}  // namespace dramforge
