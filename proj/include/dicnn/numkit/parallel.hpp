#pragma once

#if defined(DICNN_USE_OPENMP)
#include <omp.h>
#define DICNN_OMP_FOR _Pragma("omp for schedule(static)")
#define DICNN_OMP_PARALLEL _Pragma("omp parallel")
#define DICNN_OMP_PARALLEL_FOR _Pragma("omp parallel for schedule(static)")
#else
#define DICNN_OMP_FOR
#define DICNN_OMP_PARALLEL
#define DICNN_OMP_PARALLEL_FOR
#endif

namespace dicnn::numkit {

int max_threads() noexcept;

}  // namespace dicnn::numkit
