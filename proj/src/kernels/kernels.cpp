#include "tsmpc/kernels.hpp"

#include <atomic>

namespace tsmpc::kernels {

#if defined(TSMPC_HAVE_AVX2_TU)
// defined in kernels_avx2.cpp, compiled with -mavx2 -mfma
const Ops& detail_avx2_ops();

bool avx2_available() {
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
}
#else
bool avx2_available() { return false; }
#endif

namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc0 = 0.0, acc1 = 0.0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc0 += x[i] * y[i];
    acc1 += x[i + 1] * y[i + 1];
  }
  if (i < n) acc0 += x[i] * y[i];
  return acc0 + acc1;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_scalar(const double* a, std::size_t rows, std::size_t cols, std::size_t lda,
                 const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(a + r * lda, x, cols);
}

void gemv_t_scalar(const double* a, std::size_t rows, std::size_t cols, std::size_t lda,
                   const double* x, double* y) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(x[r], a + r * lda, y, cols);
}

const Ops kScalarOps{"scalar", dot_scalar, axpy_scalar, gemv_scalar, gemv_t_scalar};

std::atomic<const Ops*> g_active{nullptr};

const Ops* pick_default() {
#if defined(TSMPC_HAVE_AVX2_TU)
  if (avx2_available()) return &detail_avx2_ops();
#endif
  return &kScalarOps;
}

}  // namespace

const Ops& scalar_ops() { return kScalarOps; }

const Ops& active() {
  const Ops* ops = g_active.load(std::memory_order_acquire);
  if (ops == nullptr) {
    ops = pick_default();
    g_active.store(ops, std::memory_order_release);
  }
  return *ops;
}

bool select(std::string_view name) {
  if (name == "scalar") {
    g_active.store(&kScalarOps, std::memory_order_release);
    return true;
  }
#if defined(TSMPC_HAVE_AVX2_TU)
  if (name == "avx2" && avx2_available()) {
    g_active.store(&detail_avx2_ops(), std::memory_order_release);
    return true;
  }
#endif
  if (name == "auto") {
    g_active.store(pick_default(), std::memory_order_release);
    return true;
  }
  return false;
}

std::vector<const Ops*> available_ops() {
  std::vector<const Ops*> out{&kScalarOps};
#if defined(TSMPC_HAVE_AVX2_TU)
  if (avx2_available()) out.push_back(&detail_avx2_ops());
#endif
  return out;
}

}  // namespace tsmpc::kernels
