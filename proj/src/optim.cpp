#include "matrixinfo/optim.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "matrixinfo/errors.hpp"
#include "matrixinfo/kernels.hpp"
#include "matrixinfo/linalg.hpp"
#include "matrixinfo/matinfo.hpp"
#include "matrixinfo/parallel.hpp"

namespace matrixinfo {

namespace {

// Eigenvalue gaps below this use the degenerate limit 1/lambda in the
// divided-difference table.
constexpr double kDegenerateGap = 1e-10;

constexpr double kArmijoC = 1e-4;
constexpr double kArmijoFactor = 0.5;
constexpr double kMinStep = 1e-14;

Matrix inverse_spd(const Spectrum& spec, double floor, const char* op) {
    if (spec.min_eigenvalue() <= floor) {
        throw SingularError(std::string(op) + ": matrix is singular at the floor");
    }
    std::vector<double> inv(spec.n());
    for (std::size_t i = 0; i < spec.n(); ++i) inv[i] = 1.0 / spec.eigenvalues[i];
    return spec.reconstruct(inv);
}

}  // namespace

Matrix grad_mce_q_commuting(const SymMatrix& p, const SymMatrix& q) {
    if (p.n() != q.n()) throw DimensionMismatchError("grad_mce_q_commuting: sizes differ");
    Spectrum q_spec = sym_eig(q);
    const Matrix q_inv = inverse_spd(q_spec, kDefaultEigenvalueFloor, "grad_mce_q_commuting");
    const Matrix pq_inv = matmul(p.matrix(), q_inv);
    return Matrix::identity(p.n()) - symmetrize(pq_inv);
}

Matrix grad_tr_plogq(const SymMatrix& p, const SymMatrix& q, double floor) {
    if (p.n() != q.n()) throw DimensionMismatchError("grad_tr_plogq: sizes differ");
    Spectrum spec = sym_eig(q);
    if (spec.min_eigenvalue() <= floor) {
        throw SingularError("grad_tr_plogq: Q is singular at the floor");
    }
    const std::size_t n = p.n();
    const Matrix& v = spec.eigenvectors;
    Matrix p_tilde = matmul(matmul(v, p.matrix(), true, false), v);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const double li = spec.eigenvalues[i];
            const double lj = spec.eigenvalues[j];
            const double divided = std::abs(li - lj) < kDegenerateGap
                                       ? 1.0 / li
                                       : (std::log(li) - std::log(lj)) / (li - lj);
            p_tilde(i, j) *= divided;
        }
    }
    return matmul(matmul(v, p_tilde), v, false, true);
}

namespace {

// Gradient of Y -> tr(P T(Y)) for the truncated log series T. P symmetric;
// Y is arbitrary square, so the non-commuting product sum is kept in full:
// grad tr(P Y^m) = sum_j (Y^{m-1-j} P Y^j)^T.
Matrix grad_series_trace(const Matrix& p, const Matrix& y, int order) {
    const std::size_t n = y.rows();
    std::vector<Matrix> y_pow;
    y_pow.reserve(order);
    y_pow.push_back(Matrix::identity(n));
    for (int m = 1; m < order; ++m) y_pow.push_back(matmul(y_pow.back(), y));

    std::vector<Matrix> p_right;  // P * Y^b
    p_right.reserve(order);
    for (int b = 0; b < order; ++b) p_right.push_back(matmul(p, y_pow[b]));

    Matrix acc(n, n);
    for (int m = 1; m <= order; ++m) {
        const double coeff = (m % 2 == 0 ? -1.0 : 1.0) / static_cast<double>(m);
        for (int j = 0; j <= m - 1; ++j) {
            const Matrix term = matmul(y_pow[m - 1 - j], p_right[j]);
            for (std::size_t col = 0; col < n; ++col)
                for (std::size_t row = 0; row < n; ++row)
                    acc(row, col) += coeff * term(col, row);  // transpose in place
        }
    }
    return acc;
}

}  // namespace

Matrix grad_trace_p_log_route(const Matrix& p, const Matrix& q, const LossConfig& cfg) {
    if (cfg.log == LogMode::exact) {
        return grad_tr_plogq(SymMatrix(symmetrize(p)), SymMatrix(symmetrize(q)), cfg.floor);
    }
    const std::size_t n = q.rows();
    const double raw_scale = trace(q) / static_cast<double>(n);
    const bool scaled = raw_scale > cfg.floor;
    const double s = scaled ? raw_scale : 1.0;
    Matrix y = q;
    kernels::scal(1.0 / s, y.data(), n * n);
    y = y - Matrix::identity(n);

    Matrix grad_y = grad_series_trace(p, y, cfg.taylor_order);
    if (!scaled) return grad_y;

    // Chain through s = tr(Q)/d: dY = dQ/s - (Q/s^2) (tr dQ)/d, plus the
    // log(s) tr(P) term.
    double grad_y_dot_q = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        grad_y_dot_q += kernels::dot(grad_y.col(j), q.col(j), n);
    const double diag_shift = trace(p) / (s * static_cast<double>(n)) -
                              grad_y_dot_q / (static_cast<double>(n) * s * s);
    kernels::scal(1.0 / s, grad_y.data(), n * n);
    for (std::size_t i = 0; i < n; ++i) grad_y(i, i) += diag_shift;
    return grad_y;
}

Matrix grad_trace_log_route(const Matrix& q, const LossConfig& cfg) {
    return grad_trace_p_log_route(Matrix::identity(q.rows()), q, cfg);
}

namespace {

Matrix center_columns_copy(const Matrix& z) {
    const std::size_t d = z.rows();
    const std::size_t b = z.cols();
    std::vector<double> mean(d, 0.0);
    for (std::size_t j = 0; j < b; ++j) kernels::axpy(1.0 / b, z.col(j), mean.data(), d);
    Matrix out = z;
    for (std::size_t j = 0; j < b; ++j) kernels::axpy(-1.0, mean.data(), out.col(j), d);
    return out;
}

// (1/B) A Z H (or A Z without centering): the shared tail of every
// covariance chain rule.
Matrix cov_chain(const Matrix& a, const Matrix& z, const LossConfig& cfg) {
    Matrix out = matmul(a, z);
    if (cfg.centering) out = center_columns_copy(out);
    kernels::scal(1.0 / static_cast<double>(z.cols()), out.data(),
                  out.rows() * out.cols());
    return out;
}

Matrix add_ridge(Matrix m, double lambda) {
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += lambda;
    return m;
}

// Log matrix used by the alignment term along the active route; needed for
// branch-1 gradients.
Matrix log_matrix_route(const Matrix& q, const LossConfig& cfg) {
    if (cfg.log == LogMode::exact) {
        return matrix_log_spectral(SymMatrix(symmetrize(q)), cfg.floor);
    }
    const std::size_t n = q.rows();
    const double raw_scale = trace(q) / static_cast<double>(n);
    const double s = raw_scale > cfg.floor ? raw_scale : 1.0;
    Matrix scaled = q;
    kernels::scal(1.0 / s, scaled.data(), n * n);
    Matrix series = matrix_log_taylor(scaled, cfg.taylor_order);
    for (std::size_t i = 0; i < n; ++i) series(i, i) += std::log(s);
    return series;
}

struct SslGradientPieces {
    Matrix a_uniformity;  // gradient of the uniformity part wrt Q_u = C12 + lam I
    Matrix a_alignment;   // gradient of the alignment MCE part wrt Q_a, gamma included
};

SslGradientPieces ssl_q_side_pieces(const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                                    const LossConfig& cfg) {
    const std::size_t d = z1.d();
    SslGradientPieces pieces;
    const Matrix q_u = add_ridge(view_covariance(z1, z2, cfg), cfg.lambda_reg);
    pieces.a_uniformity =
        Matrix::identity(d) - (1.0 / static_cast<double>(d)) * grad_trace_log_route(q_u, cfg);

    const Matrix p_a = add_ridge(symmetrize(view_covariance(z1, z1, cfg)), cfg.lambda_reg);
    const Matrix q_a = add_ridge(symmetrize(view_covariance(z2, z2, cfg)), cfg.lambda_reg);
    pieces.a_alignment =
        cfg.gamma * (Matrix::identity(d) - grad_trace_p_log_route(p_a, q_a, cfg));
    return pieces;
}

// Branch-1 gradient shared by the MCE and KL forms; `kl_extra` carries the
// d/dP of the extra tr(P log P - P) terms when present.
Matrix ssl_grad_z1(const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                   const LossConfig& cfg, const SslGradientPieces& pieces, bool kl_form) {
    const Matrix q_a = add_ridge(symmetrize(view_covariance(z2, z2, cfg)), cfg.lambda_reg);
    Matrix dp = -1.0 * log_matrix_route(q_a, cfg);
    if (kl_form) {
        const Matrix p_a =
            add_ridge(symmetrize(view_covariance(z1, z1, cfg)), cfg.lambda_reg);
        dp = dp + matrix_log_spectral(SymMatrix(p_a), cfg.floor);
    }
    kernels::scal(cfg.gamma, dp.data(), dp.rows() * dp.cols());

    // Through C12 (uniformity log-term, its trace, and the alignment trace).
    Matrix wrt_z1 = cov_chain(pieces.a_uniformity - Matrix::identity(z1.d()), z2.z, cfg);
    // Through C11 of the alignment divergence.
    const Matrix chain_p = cov_chain(2.0 * symmetrize(dp), z1.z, cfg);
    kernels::axpy(1.0, chain_p.data(), wrt_z1.data(), wrt_z1.rows() * wrt_z1.cols());
    return wrt_z1;
}

SslGradient ssl_gradient_impl(const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                              const LossConfig& cfg, bool kl_form) {
    if (z1.d() != z2.d() || z1.batch() != z2.batch()) {
        throw DimensionMismatchError("grad_matrix_ssl: batch shapes differ");
    }
    const SslGradientPieces pieces = ssl_q_side_pieces(z1, z2, cfg);

    // wrt Z2: uniformity through C12 (including tr Q_u), the alignment trace
    // -tr C12, and the alignment divergence through C22. The KL extras do not
    // involve Z2, so this side is shared by both forms.
    SslGradient grad;
    grad.wrt_z2 =
        cov_chain(transpose(pieces.a_uniformity - Matrix::identity(z1.d())), z1.z, cfg);
    const Matrix chain_q = cov_chain(2.0 * symmetrize(pieces.a_alignment), z2.z, cfg);
    kernels::axpy(1.0, chain_q.data(), grad.wrt_z2.data(),
                  grad.wrt_z2.rows() * grad.wrt_z2.cols());

    if (!cfg.stop_grad_branch1) {
        grad.wrt_z1 = ssl_grad_z1(z1, z2, cfg, pieces, kl_form);
    }
    return grad;
}

}  // namespace

SslGradient grad_matrix_ssl(const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                            const LossConfig& cfg) {
    return ssl_gradient_impl(z1, z2, cfg, false);
}

SslGradient grad_matrix_ssl_kl(const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                               const LossConfig& cfg) {
    return ssl_gradient_impl(z1, z2, cfg, true);
}

namespace {

void project_to_tangent(Matrix& grad, const Matrix& z) {
    for (std::size_t j = 0; j < z.cols(); ++j) {
        const double radial = kernels::dot(grad.col(j), z.col(j), z.rows());
        kernels::axpy(-radial, z.col(j), grad.col(j), z.rows());
    }
}

double second_moment_stats(const Matrix& z, double* dist_to_uniform) {
    const std::size_t d = z.rows();
    Matrix moment = matmul(z, z, false, true);
    kernels::scal(1.0 / static_cast<double>(z.cols()), moment.data(), d * d);
    const double inv_d = 1.0 / static_cast<double>(d);
    Matrix dev = moment;
    for (std::size_t i = 0; i < d; ++i) dev(i, i) -= inv_d;
    *dist_to_uniform = frobenius_norm(dev);
    return erank_or_zero(symmetrize(moment));
}

}  // namespace

DescentResult descend_matrix_ssl(const EmbeddingBatch& z1_init,
                                 const EmbeddingBatch& z2_init,
                                 const LossConfig& loss_cfg, const DescentConfig& cfg,
                                 SslForm form) {
    if (cfg.step_size <= 0.0) throw PreconditionError("descend_matrix_ssl: step must be > 0");
    const bool coupled = loss_cfg.stop_grad_branch1;
    Matrix z1 = coupled ? z2_init.z : z1_init.z;
    Matrix z2 = z2_init.z;

    const auto loss_at = [&](const Matrix& m1, const Matrix& m2) {
        const EmbeddingBatch b1(m1);
        const EmbeddingBatch b2(m2);
        return form == SslForm::mce ? matrix_ssl_loss(b1, b2, loss_cfg)
                                    : matrix_ssl_kl_loss(b1, b2, loss_cfg);
    };

    DescentResult result;
    result.converged = false;
    for (long iter = 0;; ++iter) {
        const double loss = loss_at(z1, z2);
        if (!std::isfinite(loss)) {
            // Record the diverging point so the partial run survives.
            TrajectoryPoint point{};
            point.iter = iter;
            point.loss = loss;
            point.erank = second_moment_stats(z2, &point.dist_to_uniform);
            result.trajectory.push_back(point);
            throw DivergedWithTrajectory<Trajectory>(
                "descend_matrix_ssl: non-finite loss at iteration " + std::to_string(iter),
                iter, std::move(result.trajectory));
        }
        SslGradient grad =
            form == SslForm::mce
                ? grad_matrix_ssl(EmbeddingBatch(z1), EmbeddingBatch(z2), loss_cfg)
                : grad_matrix_ssl_kl(EmbeddingBatch(z1), EmbeddingBatch(z2), loss_cfg);
        if (cfg.project_sphere) {
            project_to_tangent(grad.wrt_z2, z2);
            if (grad.wrt_z1) project_to_tangent(*grad.wrt_z1, z1);
        }
        double grad_norm_sq =
            kernels::dot(grad.wrt_z2.data(), grad.wrt_z2.data(), z2.rows() * z2.cols());
        if (grad.wrt_z1) {
            grad_norm_sq +=
                kernels::dot(grad.wrt_z1->data(), grad.wrt_z1->data(), z1.rows() * z1.cols());
        }
        const double grad_norm = std::sqrt(grad_norm_sq);

        TrajectoryPoint point{};
        point.iter = iter;
        point.loss = loss;
        point.grad_norm = grad_norm;
        point.erank = second_moment_stats(z2, &point.dist_to_uniform);
        result.trajectory.push_back(point);

        if (grad_norm <= cfg.tol_grad_norm) {
            result.converged = true;
            break;
        }
        if (iter >= cfg.max_iters) break;

        double step = cfg.step_size;
        bool accepted = false;
        while (!accepted) {
            Matrix z2_next = z2;
            kernels::axpy(-step, grad.wrt_z2.data(), z2_next.data(), z2.rows() * z2.cols());
            Matrix z1_next = z1;
            if (grad.wrt_z1) {
                kernels::axpy(-step, grad.wrt_z1->data(), z1_next.data(),
                              z1.rows() * z1.cols());
            }
            if (cfg.project_sphere) {
                normalize_columns(z2_next);
                if (grad.wrt_z1) normalize_columns(z1_next);
            }
            bool take = true;
            if (cfg.armijo) {
                // Sufficient decrease of the stepped objective: the target
                // branch stays frozen here; it synchronizes only after the
                // step is accepted.
                const double next_loss = loss_at(coupled ? z1 : z1_next, z2_next);
                take = std::isfinite(next_loss) &&
                       next_loss <= loss - kArmijoC * step * grad_norm_sq;
            }
            if (take) {
                z1 = coupled ? z2_next : std::move(z1_next);
                z2 = std::move(z2_next);
                accepted = true;
            } else {
                step *= kArmijoFactor;
                if (step < kMinStep) break;
            }
        }
        if (!accepted) break;  // line search stalled at the current point
    }
    result.z1 = std::move(z1);
    result.z2 = std::move(z2);
    return result;
}

Matrix descend_mce_to_p(const SymMatrix& p, const SymMatrix& q_init,
                        const DescentConfig& cfg) {
    const std::size_t n = p.n();
    const InfoConfig info{};

    // Clamp just above the log floor so projected iterates stay strictly
    // inside the finite domain of the objective.
    const double clamp_level = 100.0 * kDefaultEigenvalueFloor;
    const auto project_spd = [&](Matrix m) {
        Spectrum spec = sym_eig(SymMatrix(symmetrize(m)));
        std::vector<double> clamped(spec.n());
        bool changed = false;
        for (std::size_t i = 0; i < spec.n(); ++i) {
            clamped[i] = spec.eigenvalues[i];
            if (clamped[i] < clamp_level) {
                clamped[i] = clamp_level;
                changed = true;
            }
        }
        return changed ? spec.reconstruct(clamped) : symmetrize(m);
    };

    Matrix q = project_spd(q_init.matrix());
    for (long iter = 0; iter <= cfg.max_iters; ++iter) {
        const double loss = mce(p, SymMatrix(q), info);
        if (!std::isfinite(loss)) {
            throw DivergedError("descend_mce_to_p: non-finite objective at iteration " +
                                    std::to_string(iter),
                                iter);
        }
        Matrix grad = Matrix::identity(n) - grad_tr_plogq(p, SymMatrix(q));
        const double grad_norm_sq = kernels::dot(grad.data(), grad.data(), n * n);
        if (std::sqrt(grad_norm_sq) <= cfg.tol_grad_norm || iter == cfg.max_iters) break;

        double step = cfg.step_size;
        while (true) {
            Matrix candidate = q;
            kernels::axpy(-step, grad.data(), candidate.data(), n * n);
            candidate = project_spd(std::move(candidate));
            if (!cfg.armijo) {
                q = std::move(candidate);
                break;
            }
            const double next_loss = mce(p, SymMatrix(candidate), info);
            if (std::isfinite(next_loss) &&
                next_loss <= loss - kArmijoC * step * grad_norm_sq) {
                q = std::move(candidate);
                break;
            }
            step *= kArmijoFactor;
            if (step < kMinStep) return q;  // no acceptable step remains
        }
    }
    return q;
}

Matrix random_unit_columns(std::size_t d, std::size_t b, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix z(d, b);
    for (std::size_t j = 0; j < b; ++j)
        for (std::size_t i = 0; i < d; ++i) z(i, j) = normal(rng);
    normalize_columns(z);
    return z;
}

namespace {

ClosedFormTrial run_closed_form_trial(std::size_t d, std::size_t b, double eps_sq,
                                      const Matrix& z) {
    ClosedFormTrial trial{};
    trial.d = d;
    trial.batch = b;
    trial.eps_sq = eps_sq;
    const double lambda = eps_sq / static_cast<double>(d);
    const double one_plus = 1.0 + static_cast<double>(d) * lambda;

    Matrix moment = matmul(z, z, false, true);
    kernels::scal(1.0 / static_cast<double>(b), moment.data(), d * d);
    Matrix q_arg = symmetrize(moment);
    for (std::size_t i = 0; i < d; ++i) q_arg(i, i) += lambda;
    const Matrix p_arg = (1.0 / static_cast<double>(d) + lambda) * Matrix::identity(d);

    const InfoConfig info{};
    trial.mce_direct = mce(SymMatrix(p_arg), SymMatrix(q_arg), info);
    trial.mkl_direct = mkl(SymMatrix(p_arg), SymMatrix(q_arg), info);

    LossConfig loss_cfg;
    loss_cfg.eps_sq = eps_sq;
    const double tcr = tcr_loss(EmbeddingBatch(z, true), loss_cfg);

    const double coeff = 2.0 * one_plus / static_cast<double>(d);
    trial.mce_closed = -one_plus * std::log(lambda) + coeff * tcr + one_plus;
    trial.mkl_closed =
        one_plus * std::log(one_plus / (lambda * static_cast<double>(d))) + coeff * tcr;
    trial.mce_alternate = one_plus * (-std::log(lambda) + 1.0 + 2.0 * tcr);

    trial.mce_rel_err = std::abs(trial.mce_direct - trial.mce_closed) /
                        std::max(1e-300, std::abs(trial.mce_direct));
    trial.mkl_rel_err = std::abs(trial.mkl_direct - trial.mkl_closed) /
                        std::max(1.0, std::abs(trial.mkl_direct));
    trial.alternate_gap = std::abs(trial.mce_direct - trial.mce_alternate);
    return trial;
}

}  // namespace

ClosedFormReport verify_tcr_closed_form(int trials, std::uint64_t seed) {
    if (trials < 1) throw PreconditionError("verify_tcr_closed_form: trials must be >= 1");

    struct TrialParams {
        std::size_t d;
        std::size_t b;
        double eps_sq;
        std::uint64_t z_seed;
    };
    std::mt19937_64 rng(seed);
    std::vector<TrialParams> params(trials);
    for (auto& p : params) {
        p.d = 2 + static_cast<std::size_t>(rng() % 7);                 // [2, 8]
        p.b = p.d + static_cast<std::size_t>(rng() % (3 * p.d + 1));   // [d, 4d]
        std::uniform_real_distribution<double> eps_dist(0.25, 4.0);
        p.eps_sq = eps_dist(rng);
        p.z_seed = rng();
    }

    ClosedFormReport report;
    report.trials.resize(trials);
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t i) {
        const TrialParams& p = params[i];
        const Matrix z = random_unit_columns(p.d, p.b, p.z_seed);
        report.trials[i] = run_closed_form_trial(p.d, p.b, p.eps_sq, z);
    });

    report.max_closed_rel_err = 0.0;
    report.min_alternate_gap = std::numeric_limits<double>::infinity();
    report.max_alternate_gap = 0.0;
    for (const ClosedFormTrial& t : report.trials) {
        report.max_closed_rel_err =
            std::max({report.max_closed_rel_err, t.mce_rel_err, t.mkl_rel_err});
        report.min_alternate_gap = std::min(report.min_alternate_gap, t.alternate_gap);
        report.max_alternate_gap = std::max(report.max_alternate_gap, t.alternate_gap);
    }

    // d = 1 pins lambda = eps^2; both coefficients coincide there.
    Matrix z1(1, 3);
    z1(0, 0) = 1.0;
    z1(0, 1) = -1.0;
    z1(0, 2) = 1.0;
    report.d1_probe = run_closed_form_trial(1, 3, 0.7, z1);
    return report;
}

}  // namespace matrixinfo
