#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace tsmpc::kernels {

// Double-precision vector kernels used by the dense linear algebra layer.
// Matrices are row-major with leading dimension `lda`. gemv/gemv_t overwrite y.
struct Ops {
  const char* name;
  double (*dot)(const double* x, const double* y, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);  // y += alpha*x
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, std::size_t lda,
               const double* x, double* y);  // y = A x
  void (*gemv_t)(const double* a, std::size_t rows, std::size_t cols, std::size_t lda,
                 const double* x, double* y);  // y = A^T x
};

const Ops& scalar_ops();

// true when the running CPU supports the AVX2+FMA variant
bool avx2_available();

// Currently selected implementation. Defaults to the best available variant,
// decided once at first use.
const Ops& active();

// Force a specific variant ("scalar" or "avx2"). Returns false and leaves the
// selection unchanged when the variant is unknown or unsupported on this CPU.
bool select(std::string_view name);

// All variants usable on this CPU, scalar first. Exposed for equivalence tests.
std::vector<const Ops*> available_ops();

}  // namespace tsmpc::kernels
