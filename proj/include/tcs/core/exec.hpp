#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tcs {

/// Execution policy for data-parallel kernels. Every kernel computes each
/// output cell independently, so serial and parallel runs are bit-identical;
/// the serial path is kept as the reference implementation for tests and
/// benchmarks.
enum class Exec {
  kSerial,
  kParallel,
};

namespace detail {

template <typename Fn>
void parallel_rows(int rows, Exec exec, Fn&& fn) {
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) {
      fn(r);
    }
  } else {
    for (int r = 0; r < rows; ++r) {
      fn(r);
    }
  }
}

}  // namespace detail
}  // namespace tcs
