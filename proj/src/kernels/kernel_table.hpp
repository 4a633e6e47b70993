#pragma once

#include "qrs/kernels.hpp"

namespace qrs::kernels::detail {

const Table& scalar_table();
#if QRS_HAVE_AVX2
const Table& avx2_table();
#endif

}  // namespace qrs::kernels::detail
