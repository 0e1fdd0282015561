#pragma once

#include "matrixinfo/matrix.hpp"

namespace matrixinfo {

/// Eigenvalues below this are treated as zero inside matrix logarithms,
/// implementing the log(0) := 0 convention robustly under round-off.
inline constexpr double kDefaultEigenvalueFloor = 1e-12;

/// Round-off slack when classifying a spectrum as positive semi-definite.
inline constexpr double kPsdSlack = 1e-9;

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.
/// Eigenvalues come back sorted descending with matching eigenvector
/// columns; negative values within kPsdSlack of zero are clamped to zero.
/// Throws NonConvergenceError after 100 sweeps without reaching
/// off-diagonal Frobenius norm <= 1e-12 * ||A||_F.
Spectrum sym_eig(const SymMatrix& a);

/// V diag(g(lambda)) Vt with g(x) = log x above `floor` and 0 at or below it.
/// Throws NotPsdError when any eigenvalue is below -kPsdSlack.
Matrix matrix_log_spectral(const SymMatrix& a, double floor = kDefaultEigenvalueFloor);

/// Truncated series sum_{m=1..order} (-1)^{m+1} (A-I)^m / m. Valid for any
/// square matrix; converges when ||A - I|| < 1 and is otherwise the caller's
/// deliberate truncation. Throws InvalidOrderError for order < 1.
Matrix matrix_log_taylor(const Matrix& a, int order);

/// Truncated exponential series sum_{m=0..order} A^m / m!.
Matrix matrix_exp_series(const Matrix& a, int order);

/// Domain report for the series log: ||A - I|| in spectral and Frobenius
/// norms. The series requires the spectral condition; the Frobenius norm is
/// reported alongside because the two can disagree near the boundary.
struct TaylorDomain {
    double spectral_norm;
    double frobenius_norm;
    bool spectral_ok;    // spectral_norm < 1
    bool frobenius_ok;   // frobenius_norm < 1
};
TaylorDomain taylor_log_domain(const Matrix& a);

/// (1/B) Z1 H_B Z2t with the centering matrix H_B = I - (1/B) 1 1t; equal to
/// the covariance of mean-subtracted columns. Requires matching shapes and
/// B >= 2.
Matrix centered_cross_cov(const EmbeddingBatch& z1, const EmbeddingBatch& z2);

/// Uncentered second-moment matrix (1/B) Z1 Z2t.
Matrix cross_gram(const EmbeddingBatch& z1, const EmbeddingBatch& z2);

/// True iff the minimum eigenvalue is >= -tol.
bool is_psd(const SymMatrix& a, double tol = kPsdSlack);

/// Sum of log-eigenvalues of a symmetric positive definite matrix. Throws
/// SingularError when the smallest eigenvalue is at or below `floor`.
double logdet_spd(const SymMatrix& a, double floor = kDefaultEigenvalueFloor);

}  // namespace matrixinfo
