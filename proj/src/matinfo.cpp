#include "matrixinfo/matinfo.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "matrixinfo/errors.hpp"
#include "matrixinfo/kernels.hpp"

namespace matrixinfo {

namespace {

// Mass below this in a zero eigendirection of Q counts as no mass at all;
// scaled by tr(P) so the test is scale-aware.
constexpr double kNullspaceMassTol = 1e-9;

Spectrum psd_spectrum(const SymMatrix& a, const char* op) {
    Spectrum spec = sym_eig(a);
    if (spec.min_eigenvalue() < -kPsdSlack) {
        throw NotPsdError(std::string(op) + ": input is not positive semi-definite (min "
                          "eigenvalue " + std::to_string(spec.min_eigenvalue()) + ")");
    }
    return spec;
}

double entropy_terms(const Spectrum& spec, double floor) {
    double acc = 0.0;
    for (double lambda : spec.eigenvalues)
        if (lambda > floor) acc -= lambda * std::log(lambda);
    return acc;
}

}  // namespace

double matrix_entropy(const SymMatrix& a, const InfoConfig& cfg) {
    Spectrum spec = psd_spectrum(a, "matrix_entropy");
    return entropy_terms(spec, cfg.floor) + kernels::sum(spec.eigenvalues.data(), spec.n());
}

double vne(const SymMatrix& a, const InfoConfig& cfg) {
    return entropy_terms(psd_spectrum(a, "vne"), cfg.floor);
}

TraceLogResult trace_p_log_q(const Matrix& p, const Spectrum& q_spec, double floor) {
    const std::size_t n = q_spec.n();
    const Matrix pv = matmul(p, q_spec.eigenvectors);
    const double mass_tol = kNullspaceMassTol * std::max(1.0, std::abs(trace(p)));
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double mass = kernels::dot(q_spec.eigenvectors.col(i), pv.col(i), n);
        const double lambda = q_spec.eigenvalues[i];
        if (lambda > floor) {
            acc += mass * std::log(lambda);
        } else if (mass > mass_tol) {
            return {0.0, false};
        }
    }
    return {acc, true};
}

double mkl(const SymMatrix& p, const SymMatrix& q, const InfoConfig& cfg) {
    if (p.n() != q.n()) throw DimensionMismatchError("mkl: operand sizes differ");
    Spectrum p_spec = psd_spectrum(p, "mkl");
    Spectrum q_spec = psd_spectrum(q, "mkl");
    const TraceLogResult plogq = trace_p_log_q(p.matrix(), q_spec, cfg.floor);
    if (!plogq.finite) return std::numeric_limits<double>::infinity();
    double tr_plogp = 0.0;
    for (double lambda : p_spec.eigenvalues)
        if (lambda > cfg.floor) tr_plogp += lambda * std::log(lambda);
    return tr_plogp - plogq.value - trace(p.matrix()) + trace(q.matrix());
}

double mce(const SymMatrix& p, const SymMatrix& q, const InfoConfig& cfg) {
    if (p.n() != q.n()) throw DimensionMismatchError("mce: operand sizes differ");
    psd_spectrum(p, "mce");
    Spectrum q_spec = psd_spectrum(q, "mce");
    const TraceLogResult plogq = trace_p_log_q(p.matrix(), q_spec, cfg.floor);
    if (!plogq.finite) return std::numeric_limits<double>::infinity();
    return -plogq.value + trace(q.matrix());
}

namespace {

std::vector<double> singular_values(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatchError("erank: matrix not square");
    if (is_symmetric(a, kDefaultSymTol)) {
        Spectrum spec = sym_eig(SymMatrix(symmetrize(a)));
        std::vector<double> sigma(spec.n());
        for (std::size_t i = 0; i < spec.n(); ++i) sigma[i] = std::abs(spec.eigenvalues[i]);
        return sigma;
    }
    // General square input: singular values through the eigenvalues of At A.
    Matrix ata = matmul(a, a, true, false);
    Spectrum spec = sym_eig(SymMatrix(symmetrize(ata)));
    std::vector<double> sigma(spec.n());
    for (std::size_t i = 0; i < spec.n(); ++i)
        sigma[i] = std::sqrt(std::max(spec.eigenvalues[i], 0.0));
    return sigma;
}

}  // namespace

double erank(const Matrix& a, const InfoConfig& cfg) {
    const std::vector<double> sigma = singular_values(a);
    const double total = kernels::sum(sigma.data(), sigma.size());
    if (total <= 0.0) {
        throw ZeroMatrixError("erank: undefined for the all-zero matrix");
    }
    double entropy = 0.0;
    for (double s : sigma) {
        const double share = s / total;
        if (share > cfg.floor) entropy -= share * std::log(share);
    }
    return std::exp(entropy);
}

double erank_or_zero(const Matrix& a, const InfoConfig& cfg) {
    try {
        return erank(a, cfg);
    } catch (const ZeroMatrixError&) {
        return 0.0;
    }
}

}  // namespace matrixinfo
