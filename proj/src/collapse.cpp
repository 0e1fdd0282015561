#include "matrixinfo/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "matrixinfo/errors.hpp"
#include "matrixinfo/kernels.hpp"
#include "matrixinfo/linalg.hpp"
#include "matrixinfo/matinfo.hpp"
#include "matrixinfo/parallel.hpp"

namespace matrixinfo {

LabeledEmbeddings::LabeledEmbeddings(Matrix z_in, std::vector<std::uint32_t> labels_in)
    : z(std::move(z_in)), labels(std::move(labels_in)) {
    if (z.rows() < 1 || z.cols() < 1) {
        throw DimensionMismatchError("LabeledEmbeddings: empty embedding matrix");
    }
    if (labels.size() != z.cols()) {
        throw DimensionMismatchError("LabeledEmbeddings: " + std::to_string(labels.size()) +
                                     " labels for " + std::to_string(z.cols()) + " columns");
    }
    std::uint32_t max_label = 0;
    for (std::uint32_t l : labels) max_label = std::max(max_label, l);
    num_classes_ = static_cast<std::size_t>(max_label) + 1;
    std::vector<std::size_t> counts(num_classes_, 0);
    for (std::uint32_t l : labels) ++counts[l];
    for (std::size_t c = 0; c < num_classes_; ++c) {
        if (counts[c] == 0) {
            throw PreconditionError("LabeledEmbeddings: class " + std::to_string(c) +
                                    " has no samples");
        }
    }
}

namespace {

std::vector<double> class_mean(const Matrix& z, const std::vector<std::uint32_t>& labels,
                               std::uint32_t cls) {
    const std::size_t d = z.rows();
    std::vector<double> mean(d, 0.0);
    std::size_t count = 0;
    for (std::size_t j = 0; j < z.cols(); ++j) {
        if (labels[j] == cls) {
            kernels::axpy(1.0, z.col(j), mean.data(), d);
            ++count;
        }
    }
    kernels::scal(1.0 / static_cast<double>(count), mean.data(), d);
    return mean;
}

Matrix class_scatter(const Matrix& z, const std::vector<std::uint32_t>& labels,
                     std::uint32_t cls) {
    const std::size_t d = z.rows();
    const std::vector<double> mean = class_mean(z, labels, cls);
    Matrix centered(d, 0);
    std::vector<double> buffer;
    std::size_t count = 0;
    for (std::size_t j = 0; j < z.cols(); ++j) {
        if (labels[j] != cls) continue;
        for (std::size_t i = 0; i < d; ++i) buffer.push_back(z(i, j) - mean[i]);
        ++count;
    }
    Matrix dev(d, count, std::move(buffer));
    Matrix scatter = matmul(dev, dev, false, true);
    kernels::scal(1.0 / static_cast<double>(count), scatter.data(), d * d);
    return scatter;
}

}  // namespace

IntraClassErank intra_class_erank(const LabeledEmbeddings& data) {
    const std::size_t k = data.num_classes();
    IntraClassErank out;
    out.per_class.assign(k, 0.0);
    parallel_for(k, [&](std::size_t c) {
        const Matrix scatter = class_scatter(data.z, data.labels, static_cast<std::uint32_t>(c));
        out.per_class[c] = erank_or_zero(scatter);
    });
    out.mean = kernels::sum(out.per_class.data(), k) / static_cast<double>(k);
    return out;
}

double inter_class_erank(const LabeledEmbeddings& data) {
    const std::size_t k = data.num_classes();
    if (k < 2) {
        throw TooFewClassesError("inter_class_erank: needs at least 2 classes, got " +
                                 std::to_string(k));
    }
    const std::size_t d = data.d();
    std::vector<double> global_mean(d, 0.0);
    for (std::size_t j = 0; j < data.samples(); ++j)
        kernels::axpy(1.0 / static_cast<double>(data.samples()), data.z.col(j),
                      global_mean.data(), d);

    Matrix deviations(d, k);
    for (std::size_t c = 0; c < k; ++c) {
        const std::vector<double> mean = class_mean(data.z, data.labels,
                                                    static_cast<std::uint32_t>(c));
        for (std::size_t i = 0; i < d; ++i) deviations(i, c) = mean[i] - global_mean[i];
    }
    Matrix scatter = matmul(deviations, deviations, false, true);
    kernels::scal(1.0 / static_cast<double>(k), scatter.data(), d * d);
    return erank_or_zero(scatter);
}

Matrix build_simplex_etf(std::size_t k, std::size_t d, double alpha, const Matrix& u) {
    if (k < 2) throw PreconditionError("build_simplex_etf: needs K >= 2");
    if (d < k) {
        throw DimensionMismatchError("build_simplex_etf: needs d >= K, got d=" +
                                     std::to_string(d) + " K=" + std::to_string(k));
    }
    if (alpha <= 0.0) throw PreconditionError("build_simplex_etf: alpha must be positive");
    if (u.rows() != d || u.cols() != k) {
        throw DimensionMismatchError("build_simplex_etf: U must be d x K");
    }
    const Matrix utu = matmul(u, u, true, false);
    if (max_abs(utu - Matrix::identity(k)) > 1e-8) {
        throw NotPartialOrthogonalError("build_simplex_etf: Ut U deviates from I_K");
    }
    const double scale = std::sqrt(static_cast<double>(k) / static_cast<double>(k - 1));
    Matrix m(k, k);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < k; ++i)
            m(i, j) = scale * ((i == j ? 1.0 : 0.0) - 1.0 / static_cast<double>(k));
    Matrix out = matmul(u, m);
    kernels::scal(alpha, out.data(), d * k);
    return out;
}

Matrix build_simplex_etf(std::size_t k, std::size_t d) {
    if (d < k) {
        throw DimensionMismatchError("build_simplex_etf: needs d >= K, got d=" +
                                     std::to_string(d) + " K=" + std::to_string(k));
    }
    Matrix u(d, k);
    for (std::size_t j = 0; j < k; ++j) u(j, j) = 1.0;
    return build_simplex_etf(k, d, 1.0, u);
}

EtfCheck etf_erank_check(const Matrix& v) {
    const std::size_t d = v.rows();
    const std::size_t k = v.cols();
    if (k < 2) throw PreconditionError("etf_erank_check: needs at least 2 columns");
    for (std::size_t j = 0; j < k; ++j) {
        const double norm = std::sqrt(kernels::dot(v.col(j), v.col(j), d));
        if (std::abs(norm - 1.0) > 1e-6) {
            throw PreconditionError("etf_erank_check: column " + std::to_string(j) +
                                    " has norm " + std::to_string(norm));
        }
    }
    std::vector<double> mean(d, 0.0);
    for (std::size_t j = 0; j < k; ++j)
        kernels::axpy(1.0 / static_cast<double>(k), v.col(j), mean.data(), d);
    for (std::size_t i = 0; i < d; ++i) {
        if (std::abs(mean[i]) > 1e-6) {
            throw PreconditionError("etf_erank_check: column mean coordinate " +
                                    std::to_string(i) + " is " + std::to_string(mean[i]));
        }
    }

    const Matrix gram = matmul(v, v, true, false);
    Spectrum spec = sym_eig(SymMatrix(symmetrize(gram)));

    EtfCheck check{};
    check.erank = erank(gram);
    // Simplex spectrum: K-1 eigenvalues at K/(K-1), one at zero.
    const double top = static_cast<double>(k) / static_cast<double>(k - 1);
    double residual = 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i)
        residual = std::max(residual, std::abs(spec.eigenvalues[i] - top) / top);
    residual = std::max(residual, std::abs(spec.eigenvalues[k - 1]) / top);
    check.gram_residual = residual;
    check.is_etf = residual <= 1e-6;
    return check;
}

double gram_erank(const EmbeddingBatch& z) {
    const Matrix gram = matmul(z.z, z.z, true, false);
    const Matrix outer = matmul(z.z, z.z, false, true);
    const double via_gram = erank(gram);
    const double via_outer = erank(outer);
    if (std::abs(via_gram - via_outer) > 1e-9 * std::max(1.0, via_gram)) {
        throw Error("gram_erank: Zt Z and Z Zt disagree beyond tolerance: " +
                    std::to_string(via_gram) + " vs " + std::to_string(via_outer));
    }
    return via_gram;
}

CollapseReport collapse_report(const LabeledEmbeddings& data) {
    CollapseReport report{};
    const IntraClassErank intra = intra_class_erank(data);
    report.intra_class_erank = intra.mean;
    report.per_class_eranks = intra.per_class;
    report.inter_class_erank =
        data.num_classes() >= 2 ? inter_class_erank(data) : 0.0;

    Matrix second_moment = matmul(data.z, data.z, false, true);
    kernels::scal(1.0 / static_cast<double>(data.samples()), second_moment.data(),
                  data.d() * data.d());
    const SymMatrix moment(symmetrize(second_moment));
    report.global_erank = erank_or_zero(moment.matrix());
    report.vne_global = vne(moment);
    const double inv_d = 1.0 / static_cast<double>(data.d());
    report.mkl_to_uniform = mkl(moment, SymMatrix(inv_d * Matrix::identity(data.d())));
    return report;
}

}  // namespace matrixinfo
