#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dramforge/error.hpp"

namespace dramforge {

/// A state in parameter space.
using Point = std::vector<double>;

/// A natural-log density over `ndim` coordinates, possibly unnormalized.
///
/// The callback may return -infinity for points outside the support. It
/// must be safe to call concurrently from several threads; the fork-join
/// driver evaluates candidates on worker threads.
class TargetDensity {
 public:
  using LogFunc = std::function<double(std::span<const double>)>;

  TargetDensity(int ndim, LogFunc log_func) : ndim_(ndim), log_func_(std::move(log_func)) {
    if (ndim_ < 1) throw UsageError("target density needs ndim >= 1");
    if (!log_func_) throw UsageError("target density needs a callable");
  }

  int ndim() const noexcept { return ndim_; }

  double operator()(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != ndim_) {
      throw UsageError("target expects " + std::to_string(ndim_) + " coordinates, got " +
                       std::to_string(x.size()));
    }
    return log_func_(x);
  }

 private:
  int ndim_;
  LogFunc log_func_;
};

}  // namespace dramforge
