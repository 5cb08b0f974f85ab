#pragma once

#include "dramforge/kernels.hpp"

namespace dramforge::kernels::detail {

const KernelTable& avx2_table() noexcept;
const KernelTable& neon_table() noexcept;

}  // namespace dramforge::kernels::detail
