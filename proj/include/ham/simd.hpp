#pragma once

#include <cstddef>

namespace ham::simd {

// Hot linear-algebra kernels. Each has a scalar reference and an AVX2/FMA
// variant selected at runtime; results agree to rounding.
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
// y = A x for row-major A (rows x cols).
void matvec(const double* A, const double* x, double* y, std::size_t rows, std::size_t cols);
// y_i = sum_j w[|i - j|] x_j, a symmetric Toeplitz product of size n.
void toeplitz_matvec(const double* w, const double* x, double* y, std::size_t n);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void matvec(const double* A, const double* x, double* y, std::size_t rows, std::size_t cols);
void toeplitz_matvec(const double* w, const double* x, double* y, std::size_t n);
}  // namespace scalar

bool avx2_available();
// Forces the scalar path; used by equivalence tests.
void force_scalar(bool on);

}  // namespace ham::simd
