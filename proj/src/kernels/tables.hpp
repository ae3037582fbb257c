#pragma once

#include "mtc/kernels.hpp"

namespace mtc::kernels::detail {

extern const KernelTable scalar_table;

#ifdef MTC_HAVE_AVX2
extern const KernelTable avx2_table;
#endif

}  // namespace mtc::kernels::detail
