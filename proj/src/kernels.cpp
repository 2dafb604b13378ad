#include "glmr/kernels.hpp"

#include <atomic>

namespace glmr::kernels {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void mul_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void add_scalar_k(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void matmul_acc_scalar(const double* a, const double* b, double* c,
                       std::size_t m, std::size_t k, std::size_t n) {
  // ikj order keeps the inner loop contiguous over B and C rows.
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    double* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      axpy_scalar(arow[p], b + p * n, crow, n);
    }
  }
}

namespace {

struct Vtable {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*mul)(const double*, const double*, double*, std::size_t);
  void (*add)(const double*, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
  void (*matmul_acc)(const double*, const double*, double*, std::size_t,
                     std::size_t, std::size_t);
  const char* arch;
};

constexpr Vtable kScalar{dot_scalar, axpy_scalar,      mul_scalar, add_scalar_k,
                         scale_scalar, matmul_acc_scalar, "scalar"};

#if defined(GLMR_HAVE_AVX2_TU)
constexpr Vtable kAvx2{dot_avx2,   axpy_avx2,       mul_avx2, add_avx2,
                       scale_avx2, matmul_acc_avx2, "avx2"};
#endif

const Vtable* detect() {
#if defined(GLMR_HAVE_AVX2_TU)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return &kAvx2;
#endif
  return &kScalar;
}

std::atomic<bool> g_force_scalar{false};

const Vtable& active() {
  static const Vtable* detected = detect();
  return g_force_scalar.load(std::memory_order_relaxed) ? kScalar : *detected;
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
void mul(const double* a, const double* b, double* out, std::size_t n) {
  active().mul(a, b, out, n);
}
void add(const double* a, const double* b, double* out, std::size_t n) {
  active().add(a, b, out, n);
}
void scale(double alpha, double* x, std::size_t n) {
  active().scale(alpha, x, n);
}
void matmul_acc(const double* a, const double* b, double* c, std::size_t m,
                std::size_t k, std::size_t n) {
  active().matmul_acc(a, b, c, m, k, n);
}

const char* active_arch() { return active().arch; }

void force_scalar(bool on) { g_force_scalar.store(on, std::memory_order_relaxed); }

}  // namespace glmr::kernels
