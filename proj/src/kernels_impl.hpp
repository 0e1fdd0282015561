#pragma once

#include <cstddef>

// Per-backend entry points; the dispatch table in kernels_dispatch.cpp wires
// one set of these into the public API.

namespace matrixinfo::kernels::detail {

double scalar_dot(const double* x, const double* y, std::size_t n);
void scalar_axpy(double a, const double* x, double* y, std::size_t n);
void scalar_scal(double a, double* x, std::size_t n);
double scalar_sum(const double* x, std::size_t n);
void scalar_rot(double* x, double* y, std::size_t n, double c, double s);

// avx2_* / neon_* are always linkable; when their translation unit was built
// without the matching ISA they fall back to the scalar code and the
// *_compiled() probe reports false so dispatch never selects them.
bool avx2_compiled();
double avx2_dot(const double* x, const double* y, std::size_t n);
void avx2_axpy(double a, const double* x, double* y, std::size_t n);
void avx2_scal(double a, double* x, std::size_t n);
double avx2_sum(const double* x, std::size_t n);
void avx2_rot(double* x, double* y, std::size_t n, double c, double s);

bool neon_compiled();
double neon_dot(const double* x, const double* y, std::size_t n);
void neon_axpy(double a, const double* x, double* y, std::size_t n);
void neon_scal(double a, double* x, std::size_t n);
double neon_sum(const double* x, std::size_t n);
void neon_rot(double* x, double* y, std::size_t n, double c, double s);

}  // namespace matrixinfo::kernels::detail
