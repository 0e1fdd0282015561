#include "matrixinfo/losses.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "matrixinfo/errors.hpp"
#include "matrixinfo/kernels.hpp"
#include "matrixinfo/matinfo.hpp"

namespace matrixinfo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_valid(const LossConfig& cfg) {
    if (cfg.eps_sq <= 0.0) throw PreconditionError("LossConfig: eps_sq must be positive");
    if (cfg.mu <= 0.0) throw PreconditionError("LossConfig: mu must be positive");
    if (cfg.lambda_reg < 0.0) throw PreconditionError("LossConfig: lambda_reg must be >= 0");
    if (cfg.gamma < 0.0) throw PreconditionError("LossConfig: gamma must be >= 0");
    if (cfg.taylor_order < 1) throw InvalidOrderError("LossConfig: taylor_order must be >= 1");
}

double coding_rate_scale(std::size_t d, std::size_t b, double eps_sq) {
    return static_cast<double>(d) / (static_cast<double>(b) * eps_sq);
}

// Scale factor that keeps the series argument near the identity: the mean
// eigenvalue tr(Q)/d. Falls back to 1 when the trace is too small to divide
// by, in which case the series is outside its domain anyway.
double series_scale(const Matrix& q, double floor) {
    const double s = trace(q) / static_cast<double>(q.rows());
    return s > floor ? s : 1.0;
}

Matrix add_ridge(Matrix m, double lambda) {
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += lambda;
    return m;
}

}  // namespace

Matrix view_covariance(const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                       const LossConfig& cfg) {
    return cfg.centering ? centered_cross_cov(z1, z2) : cross_gram(z1, z2);
}

double trace_log_route(const Matrix& q, const LossConfig& cfg) {
    if (q.rows() != q.cols()) throw DimensionMismatchError("trace_log_route: not square");
    const std::size_t d = q.rows();
    if (cfg.log == LogMode::exact) {
        Spectrum spec = sym_eig(SymMatrix(symmetrize(q)));
        if (spec.min_eigenvalue() < -kPsdSlack) {
            throw NotPsdError("trace_log_route: symmetrized argument is indefinite");
        }
        double acc = 0.0;
        for (double lambda : spec.eigenvalues) {
            if (lambda <= cfg.floor) return -kInf;
            acc += std::log(lambda);
        }
        return acc;
    }
    const double s = series_scale(q, cfg.floor);
    Matrix scaled = q;
    kernels::scal(1.0 / s, scaled.data(), d * d);
    return static_cast<double>(d) * std::log(s) +
           trace(matrix_log_taylor(scaled, cfg.taylor_order));
}

double trace_p_log_route(const Matrix& p, const Matrix& q, const LossConfig& cfg) {
    if (cfg.log == LogMode::exact) {
        Spectrum spec = sym_eig(SymMatrix(symmetrize(q)));
        if (spec.min_eigenvalue() < -kPsdSlack) {
            throw NotPsdError("trace_p_log_route: symmetrized argument is indefinite");
        }
        const TraceLogResult r = trace_p_log_q(p, spec, cfg.floor);
        return r.finite ? r.value : -kInf;
    }
    const std::size_t d = q.rows();
    const double s = series_scale(q, cfg.floor);
    Matrix scaled = q;
    kernels::scal(1.0 / s, scaled.data(), d * d);
    const Matrix series = matrix_log_taylor(scaled, cfg.taylor_order);
    // tr(P log Q) = log(s) tr(P) + tr(P T(Q/s - I))
    double acc = std::log(s) * trace(p);
    for (std::size_t j = 0; j < d; ++j)
        acc += kernels::dot(p.col(j), series.col(j), d);
    return acc;
}

double tcr_loss(const EmbeddingBatch& z, const LossConfig& cfg) {
    require_valid(cfg);
    const double c = coding_rate_scale(z.d(), z.batch(), cfg.eps_sq);
    const Matrix gram = matmul(z.z, z.z, false, true);
    Spectrum spec = sym_eig(SymMatrix(symmetrize(gram)));
    double acc = 0.0;
    for (double lambda : spec.eigenvalues) acc += std::log1p(c * std::max(lambda, 0.0));
    return -0.5 * acc;
}

double mec_loss(const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                const LossConfig& cfg) {
    require_valid(cfg);
    if (z1.d() != z2.d() || z1.batch() != z2.batch()) {
        throw DimensionMismatchError("mec_loss: batch shapes differ");
    }
    const double c = coding_rate_scale(z1.d(), z1.batch(), cfg.eps_sq);
    Matrix arg = matmul(z1.z, z2.z, false, true);
    kernels::scal(c, arg.data(), arg.rows() * arg.cols());
    arg = add_ridge(std::move(arg), 1.0);
    if (cfg.log == LogMode::exact) {
        Spectrum spec = sym_eig(SymMatrix(symmetrize(arg)));
        if (spec.min_eigenvalue() < -kPsdSlack) {
            throw NotPsdError("mec_loss: symmetrized argument is indefinite");
        }
        double acc = 0.0;
        for (double lambda : spec.eigenvalues)
            if (lambda > cfg.floor) acc += std::log(lambda);
        return -cfg.mu * acc;
    }
    // The published objective: series truncation applied to the raw argument,
    // no rescaling.
    return -cfg.mu * trace(matrix_log_taylor(arg, cfg.taylor_order));
}

double uniformity_loss(const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                       const LossConfig& cfg) {
    require_valid(cfg);
    const Matrix q = add_ridge(view_covariance(z1, z2, cfg), cfg.lambda_reg);
    const double trlog = trace_log_route(q, cfg);
    if (std::isinf(trlog)) return kInf;
    return -trlog / static_cast<double>(q.rows()) + trace(q);
}

namespace {

// gamma-weighted MCE(C11 + lambda I, C22 + lambda I) along the chosen route.
double alignment_mce_term(const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                          const LossConfig& cfg) {
    const Matrix p = add_ridge(symmetrize(view_covariance(z1, z1, cfg)), cfg.lambda_reg);
    const Matrix q = add_ridge(symmetrize(view_covariance(z2, z2, cfg)), cfg.lambda_reg);
    const double plogq = trace_p_log_route(p, q, cfg);
    if (std::isinf(plogq)) return kInf;
    return cfg.gamma * (-plogq + trace(q));
}

}  // namespace

double alignment_loss(const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                      const LossConfig& cfg) {
    require_valid(cfg);
    const double trace_term = -trace(view_covariance(z1, z2, cfg));
    return trace_term + alignment_mce_term(z1, z2, cfg);
}

MatrixSslParts matrix_ssl_parts(const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                                const LossConfig& cfg) {
    MatrixSslParts parts{};
    parts.uniformity = uniformity_loss(z1, z2, cfg);
    parts.alignment_trace = -trace(view_covariance(z1, z2, cfg));
    parts.alignment_mce = alignment_mce_term(z1, z2, cfg);
    parts.total = parts.uniformity + parts.alignment_trace + parts.alignment_mce;
    return parts;
}

double matrix_ssl_loss(const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                       const LossConfig& cfg) {
    return uniformity_loss(z1, z2, cfg) + alignment_loss(z1, z2, cfg);
}

double matrix_ssl_kl_loss(const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                          const LossConfig& cfg) {
    require_valid(cfg);
    const std::size_t d = z1.d();
    const Matrix q_u = add_ridge(view_covariance(z1, z2, cfg), cfg.lambda_reg);
    const double trlog_u = trace_log_route(q_u, cfg);
    if (std::isinf(trlog_u)) return kInf;
    // MKL((1/d) I || Q) = -log d - (1/d) tr log Q - 1 + tr Q.
    const double uniformity_kl = -std::log(static_cast<double>(d)) -
                                 trlog_u / static_cast<double>(d) - 1.0 + trace(q_u);

    const Matrix p_a = add_ridge(symmetrize(view_covariance(z1, z1, cfg)), cfg.lambda_reg);
    const Matrix q_a = add_ridge(symmetrize(view_covariance(z2, z2, cfg)), cfg.lambda_reg);
    const double plogq = trace_p_log_route(p_a, q_a, cfg);
    if (std::isinf(plogq)) return kInf;
    Spectrum p_spec = sym_eig(SymMatrix(p_a));
    double tr_plogp = 0.0;
    for (double lambda : p_spec.eigenvalues)
        if (lambda > cfg.floor) tr_plogp += lambda * std::log(lambda);
    const double alignment_kl =
        cfg.gamma * (tr_plogp - plogq - trace(p_a) + trace(q_a));

    const double trace_term = -trace(view_covariance(z1, z2, cfg));
    return uniformity_kl + trace_term + alignment_kl;
}

namespace {

void validate_distribution(const std::vector<double>& p, std::size_t n, const char* name) {
    if (p.size() != n) {
        throw InvalidDistributionError(std::string("matrix_llm_loss: ") + name +
                                       " has wrong length");
    }
    double total = 0.0;
    for (double v : p) {
        if (v < -1e-12) {
            throw InvalidDistributionError(std::string("matrix_llm_loss: ") + name +
                                           " has a negative entry");
        }
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw InvalidDistributionError(std::string("matrix_llm_loss: ") + name +
                                       " sums to " + std::to_string(total));
    }
}

Matrix weighted_outer_sum(const Matrix& e, const std::vector<double>& w) {
    Matrix scaled = e;
    for (std::size_t j = 0; j < e.cols(); ++j)
        kernels::scal(w[j], scaled.col(j), e.rows());
    return matmul(scaled, e, false, true);
}

}  // namespace

double matrix_llm_loss(std::span<const TokenStep> steps, double floor) {
    if (steps.empty()) return 0.0;
    const Matrix& e = steps.front().embeddings;
    const std::size_t n = e.cols();
    for (std::size_t j = 0; j < n; ++j) {
        const double norm = std::sqrt(kernels::dot(e.col(j), e.col(j), e.rows()));
        if (std::abs(norm - 1.0) > 1e-8) {
            throw PreconditionError("matrix_llm_loss: embedding column " +
                                    std::to_string(j) + " is not unit norm");
        }
    }
    const InfoConfig info{floor};
    double total = 0.0;
    for (const TokenStep& step : steps) {
        if (!(step.embeddings == e)) {
            throw EmbeddingMismatchError(
                "matrix_llm_loss: steps disagree on the shared embeddings");
        }
        validate_distribution(step.p, n, "p");
        validate_distribution(step.q, n, "q");
        for (std::size_t i = 0; i < n; ++i) {
            if (step.q[i] > floor) {
                if (step.p[i] > 0.0) total -= step.p[i] * std::log(step.q[i]);
            } else if (step.p[i] > 1e-9) {
                return kInf;
            }
        }
        const SymMatrix p_mat(weighted_outer_sum(e, step.p));
        const SymMatrix q_mat(weighted_outer_sum(e, step.q));
        const double step_mce = mce(p_mat, q_mat, info);
        if (std::isinf(step_mce)) return kInf;
        total += step_mce;
    }
    return total;
}

}  // namespace matrixinfo
