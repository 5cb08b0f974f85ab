#pragma once

// Reference computations used as expected values in tests. None of these
// call into the library under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

// SplitMix64 written out from its published constants.
inline std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double normal_pdf(double x, double mu, double sd) {
  const double z = (x - mu) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

// Mean and population covariance (1/n) of an explicit point list, two passes.
inline std::pair<std::vector<double>, std::vector<std::vector<double>>> two_pass_cov(
    const std::vector<std::vector<double>>& pts) {
  const std::size_t n = pts.front().size();
  std::vector<double> mean(n, 0.0);
  for (const auto& p : pts)
    for (std::size_t i = 0; i < n; ++i) mean[i] += p[i];
  for (auto& m : mean) m /= static_cast<double>(pts.size());
  std::vector<std::vector<double>> cov(n, std::vector<double>(n, 0.0));
  for (const auto& p : pts)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) cov[i][j] += (p[i] - mean[i]) * (p[j] - mean[j]);
  for (auto& row : cov)
    for (auto& c : row) c /= static_cast<double>(pts.size());
  return {mean, cov};
}

// Autocorrelation of an explicit series, straight from the definition.
inline std::vector<double> brute_acf(const std::vector<double>& x, std::size_t max_lag) {
  const std::size_t n = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (double v : x) c0 += (v - mean) * (v - mean);
  std::vector<double> rho(max_lag + 1, 0.0);
  rho[0] = 1.0;
  if (c0 == 0.0) return rho;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double c = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) c += (x[t] - mean) * (x[t + k] - mean);
    rho[k] = c / c0;
  }
  return rho;
}

// Intervals of the real line on which a*N(m1,s1) - b*N(m2,s2) has constant
// sign, from the roots of the log-ratio quadratic.
inline std::vector<double> crossing_points(double a, double m1, double s1, double b, double m2, double s2) {
  // log(a N1) - log(b N2) = A y^2 + B y + C
  const double A = -0.5 / (s1 * s1) + 0.5 / (s2 * s2);
  const double B = m1 / (s1 * s1) - m2 / (s2 * s2);
  const double C = -0.5 * m1 * m1 / (s1 * s1) + 0.5 * m2 * m2 / (s2 * s2) + std::log(a / s1) - std::log(b / s2);
  std::vector<double> roots;
  if (std::abs(A) < 1e-14) {
    if (std::abs(B) > 1e-300) roots.push_back(-C / B);
  } else {
    const double disc = B * B - 4 * A * C;
    if (disc > 0) {
      const double r = std::sqrt(disc);
      roots.push_back((-B - r) / (2 * A));
      roots.push_back((-B + r) / (2 * A));
      std::sort(roots.begin(), roots.end());
    }
  }
  return roots;
}

// Integral over the real line of |a*N(m1,s1) - b*N(m2,s2)|, exact through
// normal CDFs on each constant-sign interval.
inline double abs_diff_integral(double a, double m1, double s1, double b, double m2, double s2) {
  if (a <= 0.0) return b;
  if (b <= 0.0) return a;
  auto cuts = crossing_points(a, m1, s1, b, m2, s2);
  std::vector<double> edges{-INFINITY};
  edges.insert(edges.end(), cuts.begin(), cuts.end());
  edges.push_back(INFINITY);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const auto cdf = [](double x, double m, double s) {
      if (x == -INFINITY) return 0.0;
      if (x == INFINITY) return 1.0;
      return phi_cdf((x - m) / s);
    };
    const double p = cdf(edges[i + 1], m1, s1) - cdf(edges[i], m1, s1);
    const double q = cdf(edges[i + 1], m2, s2) - cdf(edges[i], m2, s2);
    total += std::abs(a * p - b * q);
  }
  return total;
}

// Total variation between two 1-D normals (exact).
inline double tv_1d(double m1, double s1, double m2, double s2) {
  return 0.5 * abs_diff_integral(1.0, m1, s1, 1.0, m2, s2);
}

// Total variation between two 1-D normals by composite Simpson quadrature.
inline double tv_1d_simpson(double m1, double s1, double m2, double s2, int intervals = 400000) {
  const double lo = std::min(m1 - 14 * s1, m2 - 14 * s2);
  const double hi = std::max(m1 + 14 * s1, m2 + 14 * s2);
  const double h = (hi - lo) / intervals;
  double acc = 0.0;
  for (int i = 0; i <= intervals; ++i) {
    const double x = lo + i * h;
    const double f = std::abs(normal_pdf(x, m1, s1) - normal_pdf(x, m2, s2));
    acc += f * (i == 0 || i == intervals ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  return 0.5 * acc * h / 3.0;
}

// Total variation between N(mu1, S1) and N(mu2, S2) in 2-D. The pair is
// mapped so that S1 = I and S2 is diagonal (total variation is invariant
// under affine bijections); the inner integral over y is exact and the
// outer one over x uses Simpson's rule.
inline double tv_2d(const double mu1[2], const double S1[2][2], const double mu2[2], const double S2[2][2],
                    int intervals = 40000) {
  // L1 = chol(S1)
  const double l11 = std::sqrt(S1[0][0]);
  const double l21 = S1[1][0] / l11;
  const double l22 = std::sqrt(S1[1][1] - l21 * l21);
  // W = L1^{-1}
  const double w11 = 1.0 / l11, w21 = -l21 / (l11 * l22), w22 = 1.0 / l22;
  const double d0 = mu2[0] - mu1[0], d1 = mu2[1] - mu1[1];
  const double m0 = w11 * d0, m1 = w21 * d0 + w22 * d1;
  // T = W S2 W^T
  const double a = S2[0][0], b = S2[0][1], c = S2[1][1];
  const double t00 = w11 * w11 * a;
  const double t01 = w11 * (w21 * a + w22 * b);
  const double t11 = w21 * w21 * a + 2 * w21 * w22 * b + w22 * w22 * c;
  // Rotate to the eigenbasis of T.
  const double theta = 0.5 * std::atan2(2 * t01, t00 - t11);
  const double cs = std::cos(theta), sn = std::sin(theta);
  const double e0 = cs * cs * t00 + 2 * cs * sn * t01 + sn * sn * t11;
  const double e1 = sn * sn * t00 - 2 * cs * sn * t01 + cs * cs * t11;
  const double r0 = cs * m0 + sn * m1, r1 = -sn * m0 + cs * m1;
  const double s0 = std::sqrt(e0), s1 = std::sqrt(e1);

  const double lo = std::min(-14.0, r0 - 14 * s0);
  const double hi = std::max(14.0, r0 + 14 * s0);
  const double h = (hi - lo) / intervals;
  double acc = 0.0;
  for (int i = 0; i <= intervals; ++i) {
    const double x = lo + i * h;
    const double f = abs_diff_integral(normal_pdf(x, 0.0, 1.0), 0.0, 1.0, normal_pdf(x, r0, s0), r1, s1);
    acc += f * (i == 0 || i == intervals ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  return 0.5 * acc * h / 3.0;
}

// Acceptance rate of random-walk Metropolis on N(0,1) with N(0, s^2)
// increments: E[min(1, exp(-(y^2 - x^2)/2))], closed form.
inline double rwm_acceptance_closed_form(double s) { return 2.0 / std::numbers::pi * std::atan(2.0 / s); }

// Same quantity by 2-D quadrature over (x, z) with y = x + s z.
inline double rwm_acceptance_quadrature(double s, int n = 2000) {
  const double lim = 9.0;
  const double h = 2 * lim / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = -lim + i * h;
    const double wx = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    for (int j = 0; j <= n; ++j) {
      const double z = -lim + j * h;
      const double wz = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      const double y = x + s * z;
      const double alpha = std::min(1.0, std::exp(-0.5 * (y * y - x * x)));
      acc += wx * wz * alpha * normal_pdf(x, 0, 1) * normal_pdf(z, 0, 1);
    }
  }
  return acc * (h / 3.0) * (h / 3.0);
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// AR(1) series x_t = phi x_{t-1} + sqrt(1 - phi^2) e_t from a std engine.
inline std::vector<double> ar1(double phi, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> e;
  std::vector<double> x(n);
  double v = e(gen);
  const double k = std::sqrt(1 - phi * phi);
  for (auto& xi : x) {
    xi = v;
    v = phi * v + k * e(gen);
  }
  return x;
}

}  // namespace oracle
