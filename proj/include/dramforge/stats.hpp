#pragma once

#include <functional>
#include <span>

namespace dramforge {

struct KsResult {
  double statistic = 0.0;  // D
  double p_value = 1.0;
};

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_q(double lambda) noexcept;

/// Standard normal CDF.
double normal_cdf(double x) noexcept;

/// Two-sample Kolmogorov-Smirnov test on sorted inputs (sizes >= 5).
/// The p-value uses the asymptotic distribution with effective size
/// n_a * n_b / (n_a + n_b).
KsResult ks_two_sample(std::span<const double> a_sorted, std::span<const double> b_sorted);

/// One-sample test of sorted data against a continuous CDF.
KsResult ks_one_sample(std::span<const double> sorted, const std::function<double(double)>& cdf);

}  // namespace dramforge
