// Reference kernels. Plain left-to-right loops; these define the expected
// values the SIMD variants are tested against.

#include "dramforge/kernels.hpp"

namespace dramforge::kernels {

namespace {

double sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void shifted_scalar(const double* x, std::size_t n, double shift, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - shift;
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{Isa::scalar, &sum_scalar, &dot_scalar, &shifted_scalar};
  return table;
}

}  // namespace dramforge::kernels
