#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace dramforge::kernels {

/// Instruction sets with a kernel implementation.
enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa) noexcept;

/// Function table for one instruction set. Every variant computes the same
/// mathematical quantity; only the summation order differs, so results
/// agree with the scalar reference to a few ulps per term.
struct KernelTable {
  Isa isa;
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  /// out[i] = x[i] - shift
  void (*shifted)(const double* x, std::size_t n, double shift, double* out);
};

const KernelTable& scalar_table() noexcept;

/// True when the running CPU supports `isa` and it was compiled in.
bool available(Isa isa) noexcept;

/// Table for a specific ISA; falls back to scalar when unavailable.
const KernelTable& table_for(Isa isa) noexcept;

/// The table selected at first use: the widest available ISA unless the
/// environment variable DRAMFORGE_ISA names another one ("scalar", "avx2",
/// "neon").
const KernelTable& active() noexcept;

/// Overrides the active table (tests and benchmarks). Not thread safe.
void force(Isa isa) noexcept;

inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

/// Lagged products of a centered series:
/// out[j] = sum_{t=0}^{n-1-lag} x[t] * x[t+lag], lag = first_lag + j.
/// Lags at or beyond n yield 0.
void lagged_products(std::span<const double> x, std::size_t first_lag, std::span<double> out);

}  // namespace dramforge::kernels
