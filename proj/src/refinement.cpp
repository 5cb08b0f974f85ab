#include "dramforge/refinement.hpp"

#include <algorithm>
#include <cmath>

#include "dramforge/error.hpp"
#include "dramforge/kernels.hpp"

namespace dramforge {

namespace {

constexpr std::size_t kLagBlock = 32;

struct Runs {
  std::vector<double> centered;
  std::vector<std::int64_t> start;  // verbose index of each run
  std::vector<std::int64_t> weight;
  std::int64_t total = 0;
  double c0 = 0.0;
};

Runs make_runs(std::span<const double> values, std::span<const std::int64_t> weights) {
  if (values.size() != weights.size()) throw UsageError("values and weights differ in length");
  Runs r;
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (weights[i] < 1) throw UsageError("weights must be positive");
    r.start.push_back(r.total);
    r.weight.push_back(weights[i]);
    r.total += weights[i];
    sum += static_cast<double>(weights[i]) * values[i];
  }
  const double mean = r.total > 0 ? sum / static_cast<double>(r.total) : 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    r.centered.push_back(values[i] - mean);
    r.c0 += static_cast<double>(weights[i]) * r.centered.back() * r.centered.back();
  }
  return r;
}

// sum_t y_t * y_{t+lag} over the verbose series, walking pairs of
// overlapping runs.
double run_lag_product(const Runs& r, std::int64_t lag) {
  double acc = 0.0;
  std::size_t j = 0;
  const std::size_t n = r.centered.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t lo = r.start[i] + lag;
    const std::int64_t hi = r.start[i] + r.weight[i] + lag;  // exclusive
    if (lo >= r.total) break;
    while (j < n && r.start[j] + r.weight[j] <= lo) ++j;
    double inner = 0.0;
    for (std::size_t k = j; k < n && r.start[k] < hi; ++k) {
      const std::int64_t overlap = std::min(hi, r.start[k] + r.weight[k]) - std::max(lo, r.start[k]);
      inner += static_cast<double>(overlap) * r.centered[k];
    }
    acc += r.centered[i] * inner;
  }
  return acc;
}

double tau_from_runs(const Runs& r) {
  if (r.total < 2 || !(r.c0 > 0.0)) return 1.0;
  const auto max_lag = std::min<std::int64_t>(r.total - 1, static_cast<std::int64_t>(kMaxAcfLag));
  double sum = 0.0;
  for (std::int64_t k = 1; k <= max_lag; ++k) {
    const double rho = run_lag_product(r, k) / r.c0;
    if (!(rho > 0.0)) break;
    sum += rho;
  }
  return std::max(1.0, 1.0 + 2.0 * sum);
}

std::vector<double> centered(std::span<const double> series) {
  std::vector<double> y(series.size());
  if (series.empty()) return y;
  const auto& k = kernels::active();
  const double mean = k.sum(series.data(), series.size()) / static_cast<double>(series.size());
  k.shifted(series.data(), series.size(), mean, y.data());
  return y;
}

double max_tau(const std::vector<std::vector<double>>& columns) {
  double tau = 1.0;
  for (const auto& c : columns) tau = std::max(tau, integrated_autocorrelation_time(c));
  return tau;
}

}  // namespace

std::vector<double> weighted_acf(std::span<const double> values, std::span<const std::int64_t> weights,
                                 std::size_t max_lag) {
  const Runs r = make_runs(values, weights);
  if (r.total < 2) throw UsageError("autocorrelation needs at least two verbose elements");
  if (static_cast<std::int64_t>(max_lag) >= r.total) throw UsageError("max_lag must be below the series length");
  std::vector<double> rho(max_lag + 1, 0.0);
  rho[0] = 1.0;
  if (!(r.c0 > 0.0)) return rho;
  for (std::size_t k = 1; k <= max_lag; ++k) rho[k] = run_lag_product(r, static_cast<std::int64_t>(k)) / r.c0;
  return rho;
}

std::vector<double> acf(std::span<const double> series, std::size_t max_lag) {
  if (series.size() < 2) throw UsageError("autocorrelation needs at least two elements");
  if (max_lag >= series.size()) throw UsageError("max_lag must be below the series length");
  const auto y = centered(series);
  const double c0 = kernels::dot(y, y);
  std::vector<double> rho(max_lag + 1, 0.0);
  rho[0] = 1.0;
  if (!(c0 > 0.0)) return rho;
  kernels::lagged_products(y, 1, std::span(rho).subspan(1));
  for (std::size_t k = 1; k <= max_lag; ++k) rho[k] /= c0;
  return rho;
}

double integrated_autocorrelation(std::span<const double> rho) {
  if (rho.empty() || rho[0] != 1.0) throw UsageError("autocorrelation must start with rho(0) = 1");
  double sum = 0.0;
  for (std::size_t k = 1; k < rho.size(); ++k) {
    if (!(rho[k] > 0.0)) break;
    sum += rho[k];
  }
  return std::max(1.0, 1.0 + 2.0 * sum);
}

double integrated_autocorrelation_time(std::span<const double> series) {
  if (series.size() < 2) return 1.0;
  const auto y = centered(series);
  const double c0 = kernels::dot(y, y);
  if (!(c0 > 0.0)) return 1.0;
  const std::size_t max_lag = std::min(series.size() - 1, kMaxAcfLag);
  double block[kLagBlock];
  double sum = 0.0;
  for (std::size_t first = 1; first <= max_lag; first += kLagBlock) {
    const std::size_t count = std::min(kLagBlock, max_lag - first + 1);
    kernels::lagged_products(y, first, std::span(block, count));
    for (std::size_t j = 0; j < count; ++j) {
      const double rho = block[j] / c0;
      if (!(rho > 0.0)) return std::max(1.0, 1.0 + 2.0 * sum);
      sum += rho;
    }
  }
  return std::max(1.0, 1.0 + 2.0 * sum);
}

double integrated_autocorrelation_time(std::span<const double> values, std::span<const std::int64_t> weights) {
  return tau_from_runs(make_runs(values, weights));
}

std::vector<double> thin(std::span<const double> series, std::size_t stride) {
  if (stride == 0) throw UsageError("thinning stride must be positive");
  std::vector<double> out;
  out.reserve(series.size() / stride + 1);
  for (std::size_t i = 0; i < series.size(); i += stride) out.push_back(series[i]);
  return out;
}

namespace {

// Every series has |rho(k)| <= band / sqrt(n) for k = 1..kWhiteNoiseLags.
bool indistinguishable_from_white_noise(const std::vector<std::vector<double>>& columns) {
  const std::size_t n = columns[0].size();
  if (n < 2) return true;
  const double limit = kWhiteNoiseBand / std::sqrt(static_cast<double>(n));
  const std::size_t lags = std::min(kWhiteNoiseLags, n - 1);
  for (const auto& c : columns) {
    const auto rho = acf(c, lags);
    for (std::size_t k = 1; k <= lags; ++k)
      if (std::abs(rho[k]) > limit) return false;
  }
  return true;
}

}  // namespace

RefinedSample refine(const CompactChain& chain, std::int64_t burnin) {
  RefinedSample out;
  out.source_burnin = std::max<std::int64_t>(0, burnin);
  const auto first = static_cast<std::size_t>(std::min<std::int64_t>(out.source_burnin, static_cast<std::int64_t>(chain.rows.size())));
  const auto ndim = static_cast<std::size_t>(chain.ndim);

  // columns[0] is logf, columns[1 + d] coordinate d.
  std::vector<std::vector<double>> columns(ndim + 1);
  for (std::size_t i = first; i < chain.rows.size(); ++i) {
    const auto& r = chain.rows[i];
    for (std::int64_t w = 0; w < r.weight; ++w) {
      columns[0].push_back(r.logf);
      for (std::size_t d = 0; d < ndim; ++d) columns[d + 1].push_back(r.state[d]);
    }
  }

  if (columns[0].size() >= 2) {
    while (true) {
      const double tau = max_tau(columns);
      out.iac_history.push_back(tau);
      if (tau <= kRefinementTolerance || indistinguishable_from_white_noise(columns)) break;
      const auto stride = static_cast<std::size_t>(std::ceil(tau));
      for (auto& c : columns) c = thin(c, stride);
      if (columns[0].size() < kRefinementMinSize) break;
    }
  } else if (columns[0].empty() && !chain.rows.empty()) {
    // Nothing after burn-in: keep the last state alone.
    const auto& r = chain.rows.back();
    columns[0].push_back(r.logf);
    for (std::size_t d = 0; d < ndim; ++d) columns[d + 1].push_back(r.state[d]);
  }

  out.logf = columns[0];
  out.states.resize(out.logf.size(), Point(ndim));
  for (std::size_t i = 0; i < out.logf.size(); ++i)
    for (std::size_t d = 0; d < ndim; ++d) out.states[i][d] = columns[d + 1][i];
  return out;
}

double effective_sample_size(const CompactChain& chain, std::int64_t burnin) {
  const auto first = static_cast<std::size_t>(std::clamp<std::int64_t>(burnin, 0, static_cast<std::int64_t>(chain.rows.size())));
  const auto n = chain.rows.size() - first;
  if (n == 0) return 0.0;
  std::vector<std::int64_t> weights(n);
  std::vector<double> values(n);
  std::int64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    weights[i] = chain.rows[first + i].weight;
    total += weights[i];
  }
  double tau = 1.0;
  for (int c = -1; c < chain.ndim; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& r = chain.rows[first + i];
      values[i] = c < 0 ? r.logf : r.state[static_cast<std::size_t>(c)];
    }
    tau = std::max(tau, integrated_autocorrelation_time(values, weights));
  }
  return static_cast<double>(total) / tau;
}

CompactChain as_chain(const RefinedSample& sample, int ndim) {
  CompactChain c;
  c.ndim = ndim;
  for (std::size_t i = 0; i < sample.states.size(); ++i) {
    ChainRow r;
    r.logf = sample.logf[i];
    r.state = sample.states[i];
    c.rows.push_back(std::move(r));
  }
  return c;
}

}  // namespace dramforge
