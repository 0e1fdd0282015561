#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "matrixinfo/losses.hpp"
#include "matrixinfo/matrix.hpp"

namespace matrixinfo {

struct DescentConfig {
    double step_size = 0.05;
    long max_iters = 5000;
    double tol_grad_norm = 1e-7;
    std::uint64_t seed = 0;
    bool project_sphere = true;
    // Optional safeguard: halve the step until sufficient decrease holds.
    // The sufficient-decrease test is taken on the objective the step
    // direction differentiates (target branch frozen under stop-gradient).
    bool armijo = false;
};

struct TrajectoryPoint {
    long iter;
    double loss;
    double erank;            // effective rank of (1/B) Z Zt
    double dist_to_uniform;  // || (1/B) Z Zt - (1/d) I ||_F
    double grad_norm;        // projected gradient norm
};
using Trajectory = std::vector<TrajectoryPoint>;

/// -P Q^{-1} + I, symmetrized: the commuting-case stationarity gradient of
/// Q -> MCE(P, Q). Exact when P and Q share an eigenbasis; kept as the fast
/// path next to the exact grad_tr_plogq form.
Matrix grad_mce_q_commuting(const SymMatrix& p, const SymMatrix& q);

/// Exact gradient of Q -> tr(P log Q) for SPD Q: with Q = V diag(l) Vt and
/// Pt = Vt P V, returns V (Pt o L) Vt where L holds the first divided
/// differences of log over the eigenvalues. Throws SingularError when Q has
/// an eigenvalue at or below the floor.
Matrix grad_tr_plogq(const SymMatrix& p, const SymMatrix& q,
                     double floor = kDefaultEigenvalueFloor);

/// Gradient of Q -> tr(P log Q) matching trace_p_log_route exactly,
/// including the series rescaling chain in taylor mode. P must be symmetric.
Matrix grad_trace_p_log_route(const Matrix& p, const Matrix& q, const LossConfig& cfg);

/// Gradient of Q -> tr log Q matching trace_log_route.
Matrix grad_trace_log_route(const Matrix& q, const LossConfig& cfg);

struct SslGradient {
    Matrix wrt_z2;
    std::optional<Matrix> wrt_z1;  // present iff cfg.stop_grad_branch1 is false
};

/// Analytic gradient of matrix_ssl_loss.
SslGradient grad_matrix_ssl(const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                            const LossConfig& cfg);

/// Analytic gradient of matrix_ssl_kl_loss. With stop-gradient on branch 1
/// the Z2 gradient coincides with grad_matrix_ssl by construction.
SslGradient grad_matrix_ssl_kl(const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                               const LossConfig& cfg);

struct DescentResult {
    Trajectory trajectory;
    Matrix z1;
    Matrix z2;
    bool converged;  // projected gradient reached tol_grad_norm
};

/// Which form of the combined objective the descent records; under
/// stop-gradient both share the same branch-2 gradient.
enum class SslForm { mce, kl };

/// Toy unconstrained-feature optimizer: projected gradient descent on the
/// embedding columns themselves. With stop_grad_branch1 the target branch is
/// the detached copy of the online branch (weight sharing), so branch 1
/// tracks branch 2 and only Z2's initial value matters; otherwise both
/// branches receive gradients and move independently. Columns are
/// renormalized to the sphere after every step when project_sphere is set.
/// Throws DivergedError when the loss leaves the finite range.
DescentResult descend_matrix_ssl(const EmbeddingBatch& z1_init,
                                 const EmbeddingBatch& z2_init,
                                 const LossConfig& loss_cfg, const DescentConfig& cfg,
                                 SslForm form = SslForm::mce);

/// Gradient descent of Q -> MCE(P, Q) over SPD matrices (eigenvalue clamping
/// keeps iterates positive definite). Converges to Q = P, the minimizer.
Matrix descend_mce_to_p(const SymMatrix& p, const SymMatrix& q_init,
                        const DescentConfig& cfg);

/// One randomized check of the closed form tying the coding-rate loss to the
/// matrix divergences against the scaled identity.
struct ClosedFormTrial {
    std::size_t d;
    std::size_t batch;
    double eps_sq;
    double mce_direct;     // divergence evaluated from its definition
    double mce_closed;     // implemented closed form, coefficient 2(1+d lam)/d
    double mce_alternate;  // alternate coefficient 2(1+d lam); gap reported
    double mkl_direct;
    double mkl_closed;
    double mce_rel_err;        // |direct - closed| / |direct|
    double mkl_rel_err;
    double alternate_gap;      // |direct - alternate|
};

struct ClosedFormReport {
    std::vector<ClosedFormTrial> trials;
    double max_closed_rel_err;
    double min_alternate_gap;   // 0 only when d = 1
    double max_alternate_gap;
    ClosedFormTrial d1_probe;   // d = 1 case, where both coefficients agree
};

/// Draws `trials` random unit-norm batches (d in [2,8], B in [d,4d], eps^2 in
/// [0.25,4]) and compares both closed forms against direct evaluation.
/// Trials are data-parallel with a deterministic merge.
ClosedFormReport verify_tcr_closed_form(int trials, std::uint64_t seed);

/// Standard-normal embedding columns, normalized to the sphere.
Matrix random_unit_columns(std::size_t d, std::size_t b, std::uint64_t seed);

/// Central finite differences of a scalar function over matrix entries: the
/// analytic-gradient verifier. Step h = 1e-5 balances truncation against
/// round-off at double precision.
template <typename F>
Matrix fd_gradient(const F& f, const Matrix& at, double h = 1e-5) {
    Matrix grad(at.rows(), at.cols());
    Matrix probe = at;
    for (std::size_t j = 0; j < at.cols(); ++j) {
        for (std::size_t i = 0; i < at.rows(); ++i) {
            const double saved = probe(i, j);
            probe(i, j) = saved + h;
            const double up = f(probe);
            probe(i, j) = saved - h;
            const double down = f(probe);
            probe(i, j) = saved;
            grad(i, j) = (up - down) / (2.0 * h);
        }
    }
    return grad;
}

}  // namespace matrixinfo
