#include "ham/simd.hpp"

#include <atomic>
#include <vector>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define HAM_X86 1
#endif

namespace ham::simd {

namespace {
std::atomic<bool> g_force_scalar{false};
}

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void matvec(const double* A, const double* x, double* y, std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot(A + r * cols, x, cols);
}

void toeplitz_matvec(const double* w, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < i; ++j) s += w[i - j] * x[j];
        for (std::size_t j = i; j < n; ++j) s += w[j - i] * x[j];
        y[i] = s;
    }
}

}  // namespace scalar

#ifdef HAM_X86
namespace {

__attribute__((target("avx2,fma"))) double dot_avx2(const double* a, const double* b,
                                                     std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc0 = _mm256_add_pd(acc0, acc1);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc0);
    double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

__attribute__((target("avx2,fma"))) void axpy_avx2(double alpha, const double* x, double* y,
                                                   std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

// Lower part of the Toeplitz product reads w backwards; reverse once so both
// halves become contiguous dot products.
__attribute__((target("avx2,fma"))) void toeplitz_avx2(const double* w, const double* x,
                                                       double* y, std::size_t n) {
    std::vector<double> wr(n);
    for (std::size_t k = 0; k < n; ++k) wr[k] = w[n - 1 - k];
    for (std::size_t i = 0; i < n; ++i) {
        // sum_{j<i} w[i-j] x_j = sum_{j<i} wr[n-1-i+j] x_j
        double s = i > 0 ? dot_avx2(wr.data() + (n - 1 - i), x, i) : 0.0;
        s += dot_avx2(w, x + i, n - i);
        y[i] = s;
    }
}

bool detect() {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

}  // namespace
#endif

bool avx2_available() {
#ifdef HAM_X86
    static const bool ok = detect();
    return ok;
#else
    return false;
#endif
}

void force_scalar(bool on) { g_force_scalar.store(on); }

namespace {
inline bool use_avx2() { return !g_force_scalar.load(std::memory_order_relaxed) && avx2_available(); }
}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
#ifdef HAM_X86
    if (use_avx2()) return dot_avx2(a, b, n);
#endif
    return scalar::dot(a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
#ifdef HAM_X86
    if (use_avx2()) return axpy_avx2(alpha, x, y, n);
#endif
    scalar::axpy(alpha, x, y, n);
}

void matvec(const double* A, const double* x, double* y, std::size_t rows, std::size_t cols) {
#ifdef HAM_X86
    if (use_avx2()) {
        for (std::size_t r = 0; r < rows; ++r) y[r] = dot_avx2(A + r * cols, x, cols);
        return;
    }
#endif
    scalar::matvec(A, x, y, rows, cols);
}

void toeplitz_matvec(const double* w, const double* x, double* y, std::size_t n) {
#ifdef HAM_X86
    if (use_avx2()) return toeplitz_avx2(w, x, y, n);
#endif
    scalar::toeplitz_matvec(w, x, y, n);
}

}  // namespace ham::simd
