#pragma once

#include "matrixinfo/linalg.hpp"
#include "matrixinfo/matrix.hpp"

namespace matrixinfo {

struct InfoConfig {
    /// Eigenvalue floor forwarded to every matrix logarithm.
    double floor = kDefaultEigenvalueFloor;
};

/// -tr(A log A) + tr(A) over a PSD matrix, with 0 log 0 = 0.
double matrix_entropy(const SymMatrix& a, const InfoConfig& cfg = {});

/// Von Neumann entropy -tr(A log A); matrix_entropy minus the trace.
double vne(const SymMatrix& a, const InfoConfig& cfg = {});

/// Matrix KL divergence tr(P log P - P log Q - P + Q) over PSD operands.
/// Returns +infinity when Q has a floored-zero eigendirection in which P
/// carries mass (the divergence genuinely diverges there).
double mkl(const SymMatrix& p, const SymMatrix& q, const InfoConfig& cfg = {});

/// Matrix cross-entropy tr(-P log Q + Q) = MKL(P||Q) + ME(P); same
/// +infinity sentinel as mkl.
double mce(const SymMatrix& p, const SymMatrix& q, const InfoConfig& cfg = {});

/// exp of the Shannon entropy of the normalized singular-value distribution.
/// Defined for any non-all-zero square matrix; throws ZeroMatrixError on the
/// all-zero input.
double erank(const Matrix& a, const InfoConfig& cfg = {});

/// Total version of erank: the all-zero matrix maps to 0 (fully collapsed).
double erank_or_zero(const Matrix& a, const InfoConfig& cfg = {});

/// tr(P log Q) with the floored spectral log of Q, evaluated in Q's
/// eigenbasis. Returns false in `finite` when P has mass on a floored-zero
/// eigendirection of Q. Shared by the divergences here and by the gradient
/// code.
struct TraceLogResult {
    double value;
    bool finite;
};
TraceLogResult trace_p_log_q(const Matrix& p, const Spectrum& q_spec, double floor);

}  // namespace matrixinfo
