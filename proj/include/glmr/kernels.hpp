#pragma once
// Data-parallel inner loops used by the tensor core: scalar reference
// implementations plus AVX2 variants selected once at startup.
//
// Every kernel has a `_scalar` reference; the dispatched entry points go
// through function pointers so tests can compare both paths on the same data.

#include <cstddef>

namespace glmr::kernels {

// y = sum_i a[i] * b[i]
double dot_scalar(const double* a, const double* b, std::size_t n);

// y[i] += alpha * x[i]
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);

// out[i] = a[i] * b[i]
void mul_scalar(const double* a, const double* b, double* out, std::size_t n);

// out[i] = a[i] + b[i]
void add_scalar_k(const double* a, const double* b, double* out, std::size_t n);

// x[i] *= alpha
void scale_scalar(double alpha, double* x, std::size_t n);

// C[m x n] += A[m x k] * B[k x n], all row-major.
void matmul_acc_scalar(const double* a, const double* b, double* c,
                       std::size_t m, std::size_t k, std::size_t n);

#if defined(GLMR_HAVE_AVX2_TU)
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void mul_avx2(const double* a, const double* b, double* out, std::size_t n);
void add_avx2(const double* a, const double* b, double* out, std::size_t n);
void scale_avx2(double alpha, double* x, std::size_t n);
void matmul_acc_avx2(const double* a, const double* b, double* c,
                     std::size_t m, std::size_t k, std::size_t n);
#endif

// Dispatched entry points. Resolved on first use.
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void mul(const double* a, const double* b, double* out, std::size_t n);
void add(const double* a, const double* b, double* out, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void matmul_acc(const double* a, const double* b, double* c,
                std::size_t m, std::size_t k, std::size_t n);

// Name of the active instruction-set lane ("scalar" or "avx2").
const char* active_arch();

// Force the scalar lane (used by equivalence tests); pass false to restore
// auto-detection.
void force_scalar(bool on);

}  // namespace glmr::kernels
