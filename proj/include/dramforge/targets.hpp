#pragma once

#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "dramforge/core.hpp"

namespace dramforge {

struct MvnTarget {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd chol_lower;  // cached factor of `covariance`
};

/// Rosenbrock banana: logf = -sum_i [100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2] / scale.
struct RosenbrockTarget {
  int ndim = 2;
  double scale = 1.0;
};

struct MixtureComponent {
  double weight = 1.0;
  MvnTarget gaussian;
  double log_norm = 0.0;  // log of the normalizing constant of `gaussian`
};

struct GaussMixtureTarget {
  std::vector<MixtureComponent> components;
};

/// One of the built-in test densities, with its parameters validated.
class BuiltinTarget {
 public:
  using Variant = std::variant<MvnTarget, RosenbrockTarget, GaussMixtureTarget>;

  static BuiltinTarget mvn(Eigen::VectorXd mean, Eigen::MatrixXd covariance);
  static BuiltinTarget standard_mvn(int ndim);
  static BuiltinTarget rosenbrock(int ndim, double scale);
  static BuiltinTarget gauss_mixture(const std::vector<double>& weights, const std::vector<Eigen::VectorXd>& means,
                                     const std::vector<Eigen::MatrixXd>& covariances);

  int ndim() const noexcept { return ndim_; }
  const Variant& params() const noexcept { return params_; }

 private:
  BuiltinTarget(int ndim, Variant params) : ndim_(ndim), params_(std::move(params)) {}

  int ndim_;
  Variant params_;
};

/// Log-density up to an additive constant. The MVN branch omits its
/// normalization, so the standard MVN returns exactly -0.5 * sum(x_i^2).
double eval_builtin(const BuiltinTarget& target, std::span<const double> x);

TargetDensity make_density(BuiltinTarget target);

}  // namespace dramforge
