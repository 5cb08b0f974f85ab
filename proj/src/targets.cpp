#include "dramforge/targets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dramforge {

namespace {

MvnTarget make_gaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance) {
  const auto n = mean.size();
  if (n < 1) throw UsageError("mvn target needs at least one dimension");
  if (covariance.rows() != n || covariance.cols() != n)
    throw UsageError("mvn covariance must be " + std::to_string(n) + "x" + std::to_string(n));
  if (!covariance.isApprox(covariance.transpose(), 1e-12))
    throw UsageError("mvn covariance must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) throw UsageError("mvn covariance must be positive definite");
  return MvnTarget{std::move(mean), std::move(covariance), llt.matrixL()};
}

// Squared Mahalanobis distance by forward substitution, summed in
// coordinate order.
double mahalanobis_sq(const MvnTarget& g, std::span<const double> x) {
  const auto n = static_cast<int>(g.mean.size());
  thread_local std::vector<double> z;
  z.resize(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = x[static_cast<std::size_t>(i)] - g.mean[i];
    for (int j = 0; j < i; ++j) r -= g.chol_lower(i, j) * z[static_cast<std::size_t>(j)];
    const double zi = r / g.chol_lower(i, i);
    z[static_cast<std::size_t>(i)] = zi;
    total += zi * zi;
  }
  return total;
}

double eval(const MvnTarget& g, std::span<const double> x) { return -0.5 * mahalanobis_sq(g, x); }

double eval(const RosenbrockTarget& r, std::span<const double> x) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = 1.0 - x[i];
    total += 100.0 * a * a + b * b;
  }
  return -total / r.scale;
}

double eval(const GaussMixtureTarget& m, std::span<const double> x) {
  thread_local std::vector<double> terms;
  terms.clear();
  for (const auto& c : m.components)
    terms.push_back(std::log(c.weight) + c.log_norm - 0.5 * mahalanobis_sq(c.gaussian, x));
  const double peak = *std::max_element(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - peak);
  return peak + std::log(acc);
}

}  // namespace

BuiltinTarget BuiltinTarget::mvn(Eigen::VectorXd mean, Eigen::MatrixXd covariance) {
  auto g = make_gaussian(std::move(mean), std::move(covariance));
  const auto n = static_cast<int>(g.mean.size());
  return BuiltinTarget(n, std::move(g));
}

BuiltinTarget BuiltinTarget::standard_mvn(int ndim) {
  if (ndim < 1) throw UsageError("mvn target needs at least one dimension");
  return mvn(Eigen::VectorXd::Zero(ndim), Eigen::MatrixXd::Identity(ndim, ndim));
}

BuiltinTarget BuiltinTarget::rosenbrock(int ndim, double scale) {
  if (ndim < 2) throw UsageError("rosenbrock target needs ndim >= 2");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw UsageError("rosenbrock scale must be a finite positive real");
  return BuiltinTarget(ndim, RosenbrockTarget{ndim, scale});
}

BuiltinTarget BuiltinTarget::gauss_mixture(const std::vector<double>& weights,
                                           const std::vector<Eigen::VectorXd>& means,
                                           const std::vector<Eigen::MatrixXd>& covariances) {
  if (weights.empty()) throw UsageError("mixture needs at least one component");
  if (means.size() != weights.size() || covariances.size() != weights.size())
    throw UsageError("mixture weights, means and covariances must have the same count");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw UsageError("mixture weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw UsageError("mixture weights must sum to 1");

  GaussMixtureTarget mix;
  const auto n = means.front().size();
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (means[k].size() != n) throw UsageError("mixture components must share one dimension");
    MixtureComponent c;
    c.weight = weights[k];
    c.gaussian = make_gaussian(means[k], covariances[k]);
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) log_det += 2.0 * std::log(c.gaussian.chol_lower(i, i));
    c.log_norm = -0.5 * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi) + log_det);
    mix.components.push_back(std::move(c));
  }
  return BuiltinTarget(static_cast<int>(n), std::move(mix));
}

double eval_builtin(const BuiltinTarget& target, std::span<const double> x) {
  if (static_cast<int>(x.size()) != target.ndim())
    throw UsageError("builtin target expects " + std::to_string(target.ndim()) + " coordinates, got " +
                     std::to_string(x.size()));
  return std::visit([&](const auto& p) { return eval(p, x); }, target.params());
}

TargetDensity make_density(BuiltinTarget target) {
  const int ndim = target.ndim();
  return TargetDensity(ndim, [t = std::move(target)](std::span<const double> x) { return eval_builtin(t, x); });
}

}  // namespace dramforge
