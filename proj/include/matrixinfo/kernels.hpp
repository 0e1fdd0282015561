#pragma once

#include <cstddef>

// Double-precision inner-loop kernels. Each primitive has a scalar reference
// implementation plus SIMD variants (AVX2 on x86-64, NEON on AArch64); the
// active variant is picked once at startup from CPU features and can be
// overridden with force_backend() for equivalence testing.

namespace matrixinfo::kernels {

enum class Backend { scalar, avx2, neon };

const char* backend_name(Backend b);

/// Backend currently wired into the dispatch table.
Backend active_backend();

/// True when `b` can run on this machine.
bool backend_available(Backend b);

/// Overrides auto-detection. Throws matrixinfo::Error if unavailable here.
void force_backend(Backend b);

/// Restores CPU-feature auto-detection.
void reset_backend();

// y . x
double dot(const double* x, const double* y, std::size_t n);
// y += a * x
void axpy(double a, const double* x, double* y, std::size_t n);
// x *= a
void scal(double a, double* x, std::size_t n);
// sum of entries
double sum(const double* x, std::size_t n);
// plane rotation: (x, y) <- (c*x - s*y, s*x + c*y)
void rot(double* x, double* y, std::size_t n, double c, double s);

}  // namespace matrixinfo::kernels
