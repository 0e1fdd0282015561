#include "matrixinfo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "matrixinfo/errors.hpp"
#include "matrixinfo/kernels.hpp"

namespace matrixinfo {

namespace {

constexpr int kMaxJacobiSweeps = 100;

double off_diagonal_norm(const Matrix& a) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i)
            if (i != j) acc += a(i, j) * a(i, j);
    return std::sqrt(acc);
}

// Applies the two-sided rotation J(p,q,c,s)t A J(p,q,c,s) in place. Column
// updates are contiguous and run on the rot kernel; the mirrored row updates
// restore exact symmetry afterwards.
void apply_two_sided_rotation(Matrix& a, std::size_t p, std::size_t q, double c, double s) {
    const std::size_t n = a.rows();
    kernels::rot(a.col(p), a.col(q), n, c, s);
    for (std::size_t j = 0; j < n; ++j) {
        const double apj = a(p, j);
        const double aqj = a(q, j);
        a(p, j) = c * apj - s * aqj;
        a(q, j) = s * apj + c * aqj;
    }
    // Exact symmetry on the rotated cross terms.
    a(q, p) = a(p, q);
}

}  // namespace

Spectrum sym_eig(const SymMatrix& sym) {
    const std::size_t n = sym.n();
    Matrix a = symmetrize(sym.matrix());
    Matrix v = Matrix::identity(n);

    const double target = 1e-12 * std::max(frobenius_norm(a), 1e-300);
    bool converged = off_diagonal_norm(a) <= target;
    for (int sweep = 0; sweep < kMaxJacobiSweeps && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                // Skip rotations that cannot move the off-diagonal mass.
                if (std::abs(apq) <= 1e-18 * (std::abs(app) + std::abs(aqq))) {
                    continue;
                }
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                apply_two_sided_rotation(a, p, q, c, s);
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                kernels::rot(v.col(p), v.col(q), n, c, s);
            }
        }
        converged = off_diagonal_norm(a) <= target;
    }
    if (!converged) {
        throw NonConvergenceError("sym_eig: Jacobi sweeps exhausted without convergence");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    Spectrum spec;
    spec.eigenvalues.resize(n);
    spec.eigenvectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        double lambda = a(order[k], order[k]);
        if (lambda < 0.0 && lambda > -kPsdSlack) lambda = 0.0;
        spec.eigenvalues[k] = lambda;
        std::copy(v.col(order[k]), v.col(order[k]) + n, spec.eigenvectors.col(k));
    }
    return spec;
}

namespace {

void require_psd_spectrum(const Spectrum& spec, const char* op) {
    if (spec.min_eigenvalue() < -kPsdSlack) {
        throw NotPsdError(std::string(op) + ": eigenvalue " +
                          std::to_string(spec.min_eigenvalue()) + " below PSD tolerance");
    }
}

}  // namespace

Matrix matrix_log_spectral(const SymMatrix& a, double floor) {
    Spectrum spec = sym_eig(a);
    require_psd_spectrum(spec, "matrix_log_spectral");
    std::vector<double> logs(spec.n());
    for (std::size_t i = 0; i < spec.n(); ++i) {
        const double lambda = spec.eigenvalues[i];
        logs[i] = lambda > floor ? std::log(lambda) : 0.0;
    }
    return spec.reconstruct(logs);
}

Matrix matrix_log_taylor(const Matrix& a, int order) {
    if (order < 1) throw InvalidOrderError("matrix_log_taylor: order must be >= 1");
    if (a.rows() != a.cols()) {
        throw DimensionMismatchError("matrix_log_taylor: matrix not square");
    }
    const std::size_t n = a.rows();
    Matrix x = a - Matrix::identity(n);
    Matrix power = x;
    Matrix acc = x;
    for (int m = 2; m <= order; ++m) {
        power = matmul(power, x);
        const double coeff = (m % 2 == 0 ? -1.0 : 1.0) / static_cast<double>(m);
        kernels::axpy(coeff, power.data(), acc.data(), n * n);
    }
    return acc;
}

Matrix matrix_exp_series(const Matrix& a, int order) {
    if (order < 0) throw InvalidOrderError("matrix_exp_series: order must be >= 0");
    if (a.rows() != a.cols()) {
        throw DimensionMismatchError("matrix_exp_series: matrix not square");
    }
    const std::size_t n = a.rows();
    Matrix acc = Matrix::identity(n);
    Matrix term = Matrix::identity(n);
    for (int m = 1; m <= order; ++m) {
        term = matmul(term, a);
        kernels::scal(1.0 / m, term.data(), n * n);
        kernels::axpy(1.0, term.data(), acc.data(), n * n);
    }
    return acc;
}

TaylorDomain taylor_log_domain(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw DimensionMismatchError("taylor_log_domain: matrix not square");
    }
    const std::size_t n = a.rows();
    const Matrix x = a - Matrix::identity(n);

    TaylorDomain dom{};
    dom.frobenius_norm = frobenius_norm(x);

    // sqrt(lambda_max(Xt X)) by power iteration with a fixed start vector.
    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> w(n), u(n);
    double sigma_sq = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = 0.0;
            for (std::size_t j = 0; j < n; ++j) w[i] += x(i, j) * v[j];
        }
        for (std::size_t j = 0; j < n; ++j) u[j] = kernels::dot(x.col(j), w.data(), n);
        const double norm = std::sqrt(kernels::dot(u.data(), u.data(), n));
        if (norm == 0.0) {
            sigma_sq = 0.0;
            break;
        }
        for (std::size_t j = 0; j < n; ++j) v[j] = u[j] / norm;
        sigma_sq = norm;
    }
    dom.spectral_norm = std::sqrt(sigma_sq);
    dom.spectral_ok = dom.spectral_norm < 1.0;
    dom.frobenius_ok = dom.frobenius_norm < 1.0;
    return dom;
}

namespace {

Matrix center_columns(const Matrix& z) {
    const std::size_t d = z.rows();
    const std::size_t b = z.cols();
    std::vector<double> mean(d, 0.0);
    for (std::size_t j = 0; j < b; ++j) kernels::axpy(1.0 / b, z.col(j), mean.data(), d);
    Matrix centered = z;
    for (std::size_t j = 0; j < b; ++j)
        kernels::axpy(-1.0, mean.data(), centered.col(j), d);
    return centered;
}

void require_matching_batches(const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                              const char* op) {
    if (z1.d() != z2.d() || z1.batch() != z2.batch()) {
        throw DimensionMismatchError(std::string(op) + ": shapes " +
                                     std::to_string(z1.d()) + "x" + std::to_string(z1.batch()) +
                                     " vs " + std::to_string(z2.d()) + "x" +
                                     std::to_string(z2.batch()));
    }
}

}  // namespace

Matrix centered_cross_cov(const EmbeddingBatch& z1, const EmbeddingBatch& z2) {
    require_matching_batches(z1, z2, "centered_cross_cov");
    if (z1.batch() < 2) {
        throw DimensionMismatchError("centered_cross_cov: needs B >= 2");
    }
    const Matrix c1 = center_columns(z1.z);
    const Matrix c2 = center_columns(z2.z);
    Matrix cov = matmul(c1, c2, false, true);
    kernels::scal(1.0 / static_cast<double>(z1.batch()), cov.data(), cov.rows() * cov.cols());
    return cov;
}

Matrix cross_gram(const EmbeddingBatch& z1, const EmbeddingBatch& z2) {
    require_matching_batches(z1, z2, "cross_gram");
    Matrix g = matmul(z1.z, z2.z, false, true);
    kernels::scal(1.0 / static_cast<double>(z1.batch()), g.data(), g.rows() * g.cols());
    return g;
}

bool is_psd(const SymMatrix& a, double tol) {
    return sym_eig(a).min_eigenvalue() >= -tol;
}

double logdet_spd(const SymMatrix& a, double floor) {
    Spectrum spec = sym_eig(a);
    if (spec.min_eigenvalue() <= floor) {
        throw SingularError("logdet_spd: minimum eigenvalue " +
                            std::to_string(spec.min_eigenvalue()) + " at or below floor");
    }
    double acc = 0.0;
    for (double lambda : spec.eigenvalues) acc += std::log(lambda);
    return acc;
}

}  // namespace matrixinfo
