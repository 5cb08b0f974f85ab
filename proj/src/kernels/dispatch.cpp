#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace dramforge::kernels {

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "scalar";
}

bool available(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(DRAMFORGE_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(DRAMFORGE_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table_for(Isa isa) noexcept {
  if (!available(isa)) return scalar_table();
  switch (isa) {
#if defined(DRAMFORGE_HAVE_AVX2)
    case Isa::avx2: return detail::avx2_table();
#endif
#if defined(DRAMFORGE_HAVE_NEON)
    case Isa::neon: return detail::neon_table();
#endif
    default: return scalar_table();
  }
}

namespace {

const KernelTable* select_default() noexcept {
  if (const char* env = std::getenv("DRAMFORGE_ISA")) {
    const std::string_view name(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
      if (name == to_string(isa)) return &table_for(isa);
  }
  for (Isa isa : {Isa::avx2, Isa::neon})
    if (available(isa)) return &table_for(isa);
  return &scalar_table();
}

std::atomic<const KernelTable*>& active_slot() noexcept {
  static std::atomic<const KernelTable*> slot{select_default()};
  return slot;
}

}  // namespace

const KernelTable& active() noexcept { return *active_slot().load(std::memory_order_acquire); }

void force(Isa isa) noexcept { active_slot().store(&table_for(isa), std::memory_order_release); }

void lagged_products(std::span<const double> x, std::size_t first_lag, std::span<double> out) {
  const auto& k = active();
  const std::size_t n = x.size();
  for (std::size_t j = 0; j < out.size(); ++j) {
    const std::size_t lag = first_lag + j;
    out[j] = lag < n ? k.dot(x.data(), x.data() + lag, n - lag) : 0.0;
  }
}

}  // namespace dramforge::kernels
