#pragma once

#include <span>
#include <vector>

#include "matrixinfo/linalg.hpp"
#include "matrixinfo/matrix.hpp"

namespace matrixinfo {

/// How tr(P log Q) terms inside the losses evaluate the logarithm: a
/// truncated series on the raw (possibly non-symmetric) covariance, or the
/// floored spectral log of its symmetrization.
enum class LogMode { taylor, exact };

struct LossConfig {
    double eps_sq = 0.5;      // distortion epsilon^2 of the coding-rate term
    double mu = 1.0;          // overall weight of the cross-view coding-rate loss
    double lambda_reg = 1e-3; // ridge added to covariances before logs
    double gamma = 1.0;       // weight of the covariance-alignment term
    int taylor_order = 4;
    bool stop_grad_branch1 = true;
    bool centering = true;    // subtract per-row batch means inside covariances
    LogMode log = LogMode::taylor;
    double floor = kDefaultEigenvalueFloor;
};

/// Covariance the losses operate on: centered cross-covariance by default,
/// the raw scaled Gram matrix (1/B) Z1 Z2t when cfg.centering is off.
Matrix view_covariance(const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                       const LossConfig& cfg);

/// -(1/2) log det(I + (d/(B eps^2)) Z Zt), summed over eigenvalues.
double tcr_loss(const EmbeddingBatch& z, const LossConfig& cfg);

/// -mu tr(log(I + (d/(B eps^2)) Z1 Z2t)). The taylor route truncates at
/// cfg.taylor_order exactly as the training objective does; the exact route
/// evaluates the floored spectral log of the symmetrized argument.
double mec_loss(const EmbeddingBatch& z1, const EmbeddingBatch& z2, const LossConfig& cfg);

/// MCE((1/d) I, C(Z1,Z2) + lambda I). The taylor route rescales the
/// regularized covariance into the series' convergence region and restores
/// the scalar log analytically.
double uniformity_loss(const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                       const LossConfig& cfg);

/// -tr C(Z1,Z2) + gamma MCE(C(Z1,Z1)+lambda I, C(Z2,Z2)+lambda I).
double alignment_loss(const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                      const LossConfig& cfg);

/// uniformity_loss + alignment_loss under one shared configuration.
double matrix_ssl_loss(const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                       const LossConfig& cfg);

/// The same objective with both MCE terms replaced by matrix KL divergences;
/// differs from matrix_ssl_loss only by terms that do not involve Z2.
double matrix_ssl_kl_loss(const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                          const LossConfig& cfg);

/// Term-by-term breakdown reported by the CLI.
struct MatrixSslParts {
    double uniformity;
    double alignment_trace;  // -tr C(Z1,Z2)
    double alignment_mce;    // gamma-weighted covariance-alignment term
    double total;
};
MatrixSslParts matrix_ssl_parts(const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                                const LossConfig& cfg);

/// One autoregressive step: target distribution p, model distribution q, and
/// the shared d x n matrix of unit-norm token embedding columns.
struct TokenStep {
    std::vector<double> p;
    std::vector<double> q;
    Matrix embeddings;
};

/// sum_k CE(p, q) + sum_k MCE(P, Q) with P = sum_i p_i e_i e_it and Q built
/// the same way from q. The +tr(Q) inside MCE equals 1 for unit-norm
/// embeddings and is kept so values remain comparable with mce(). Zero model
/// probability under target mass yields +infinity.
double matrix_llm_loss(std::span<const TokenStep> steps,
                       double floor = kDefaultEigenvalueFloor);

// Route-aware building blocks, shared with the gradient code.

/// tr log Q via cfg.log. May return +/-infinity in exact mode when Q has
/// floored eigenvalues; throws NotPsdError for indefinite symmetrized input.
double trace_log_route(const Matrix& q, const LossConfig& cfg);

/// tr(P log Q) via cfg.log for symmetric P.
double trace_p_log_route(const Matrix& p, const Matrix& q, const LossConfig& cfg);

}  // namespace matrixinfo
