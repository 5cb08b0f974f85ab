#include "dramforge/contribution.hpp"

#include <algorithm>
#include <cmath>

#include "dramforge/error.hpp"
#include "dramforge/rng.hpp"

namespace dramforge {

std::int64_t ContributionStats::accepted_steps() const noexcept {
  std::int64_t total = 0;
  for (auto c : counts) total += c;
  return total;
}

ContributionStats contribution_from_chain(const CompactChain& chain, int num_workers) {
  if (num_workers < 1) throw UsageError("num_workers must be positive");
  ContributionStats s;
  s.counts.assign(static_cast<std::size_t>(num_workers), 0);
  std::int64_t trials = 0;
  for (std::size_t i = 1; i < chain.rows.size(); ++i) {
    const auto rank = chain.rows[i].process_id;
    if (rank < 1 || rank > num_workers)
      throw UsageError("chain row " + std::to_string(i) + " names rank " + std::to_string(rank) + " outside 1.." +
                       std::to_string(num_workers));
    ++s.counts[static_cast<std::size_t>(rank - 1)];
    trials += rank;
  }
  // Every iteration after the start point is one candidate.
  s.censored_trials = std::max<std::int64_t>(0, chain.total_weight() - 1 - trials);
  return s;
}

ContributionStats fit_geometric(ContributionStats s) {
  const auto accepted = s.accepted_steps();
  if (accepted <= 0) throw UsageError("geometric fit needs at least one accepted step");
  std::int64_t trials = s.censored_trials;
  for (std::size_t k = 0; k < s.counts.size(); ++k) trials += static_cast<std::int64_t>(k + 1) * s.counts[k];
  s.fitted_p = std::min(1.0, static_cast<double>(accepted) / static_cast<double>(trials));

  const auto kmax = static_cast<int>(s.counts.size());
  const double q = 1.0 - s.fitted_p;
  const double mass = 1.0 - std::pow(q, kmax);
  double tv = 0.0;
  for (int k = 1; k <= kmax; ++k) {
    const double fitted = std::pow(q, k - 1) * s.fitted_p / mass;
    const double empirical = static_cast<double>(s.counts[static_cast<std::size_t>(k - 1)]) / static_cast<double>(accepted);
    tv += std::abs(empirical - fitted);
  }
  s.fit_distance = 0.5 * tv;
  return s;
}

double predict_speedup(double mu, int n) {
  if (!(mu > 0.0 && mu <= 1.0)) throw UsageError("acceptance rate must lie in (0, 1]");
  if (n < 1) throw UsageError("worker count must be positive");
  return (1.0 - std::pow(1.0 - mu, n)) / mu;
}

int optimal_num_workers(double mu) {
  if (!(mu > 0.0 && mu <= 1.0)) throw UsageError("acceptance rate must lie in (0, 1]");
  if (mu >= 1.0) return 1;
  const double n = std::ceil(std::log(0.01) / std::log1p(-mu));
  return std::max(1, static_cast<int>(n));
}

SpeedupModel make_speedup_model(double mu, int num_workers) {
  SpeedupModel m;
  m.mu = mu;
  m.optimal_n = optimal_num_workers(mu);
  const int n_max = std::max(2 * m.optimal_n, num_workers);
  for (int n = 1; n <= n_max; ++n) m.curve.push_back(predict_speedup(mu, n));
  return m;
}

ForkJoinSimulation simulate_fork_join(double mu, int n, std::int64_t cycles, std::uint64_t seed) {
  if (n < 1 || cycles < 1) throw UsageError("simulation needs workers and cycles");
  ForkJoinSimulation out;
  out.cycles = cycles;
  RngState serial = rng_new(seed, 0);
  std::vector<RngState> workers;
  for (int r = 1; r <= n; ++r) workers.push_back(rng_new(seed, static_cast<std::uint64_t>(r)));
  for (std::int64_t c = 0; c < cycles; ++c) {
    if (rng_uniform(serial) < mu) ++out.serial_accepted;
    bool any = false;
    for (auto& w : workers) any = (rng_uniform(w) < mu) || any;
    if (any) ++out.parallel_accepted;
  }
  out.efficiency = out.serial_accepted > 0
                       ? static_cast<double>(out.parallel_accepted) / static_cast<double>(out.serial_accepted)
                       : 0.0;
  return out;
}

}  // namespace dramforge
