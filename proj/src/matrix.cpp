#include "matrixinfo/matrix.hpp"

#include <cmath>
#include <string>

#include "matrixinfo/errors.hpp"
#include "matrixinfo/kernels.hpp"

namespace matrixinfo {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionMismatchError("matrix data size does not match " +
                                     std::to_string(rows_) + "x" + std::to_string(cols_));
    }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw DimensionMismatchError("ragged row in matrix literal");
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(const std::vector<double>& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatchError(std::string(op) + ": shapes " +
                                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                     " vs " + std::to_string(b.rows()) + "x" +
                                     std::to_string(b.cols()));
    }
}

}  // namespace

Matrix operator+(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "operator+");
    Matrix c = a;
    kernels::axpy(1.0, b.data(), c.data(), c.rows() * c.cols());
    return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "operator-");
    Matrix c = a;
    kernels::axpy(-1.0, b.data(), c.data(), c.rows() * c.cols());
    return c;
}

Matrix operator*(double a, const Matrix& m) {
    Matrix c = m;
    kernels::scal(a, c.data(), c.rows() * c.cols());
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i) t(j, i) = a(i, j);
    return t;
}

Matrix matmul(const Matrix& a, const Matrix& b, bool trans_a, bool trans_b) {
    const std::size_t m = trans_a ? a.cols() : a.rows();
    const std::size_t k = trans_a ? a.rows() : a.cols();
    const std::size_t kb = trans_b ? b.cols() : b.rows();
    const std::size_t n = trans_b ? b.rows() : b.cols();
    if (k != kb) {
        throw DimensionMismatchError("matmul: inner dimensions " + std::to_string(k) +
                                     " vs " + std::to_string(kb));
    }
    Matrix c(m, n);
    if (!trans_a && !trans_b) {
        // C(:,j) += B(l,j) * A(:,l): contiguous axpy down columns.
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t l = 0; l < k; ++l)
                kernels::axpy(b(l, j), a.col(l), c.col(j), m);
    } else if (!trans_a && trans_b) {
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t l = 0; l < k; ++l)
                kernels::axpy(b(j, l), a.col(l), c.col(j), m);
    } else if (trans_a && !trans_b) {
        // C(i,j) = A(:,i) . B(:,j): contiguous dot.
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < m; ++i)
                c(i, j) = kernels::dot(a.col(i), b.col(j), k);
    } else {
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < m; ++i) {
                double acc = 0.0;
                for (std::size_t l = 0; l < k; ++l) acc += a(l, i) * b(j, l);
                c(i, j) = acc;
            }
    }
    return c;
}

double trace(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatchError("trace: matrix not square");
    double t = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
    return t;
}

double frobenius_norm(const Matrix& a) {
    return std::sqrt(kernels::dot(a.data(), a.data(), a.rows() * a.cols()));
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    const double* p = a.data();
    for (std::size_t i = 0, e = a.rows() * a.cols(); i < e; ++i)
        m = std::max(m, std::abs(p[i]));
    return m;
}

Matrix symmetrize(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatchError("symmetrize: matrix not square");
    Matrix s(a.rows(), a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i) s(i, j) = 0.5 * (a(i, j) + a(j, i));
    return s;
}

bool is_symmetric(const Matrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < j; ++i) {
            const double diff = std::abs(a(i, j) - a(j, i));
            if (diff > tol * std::max(1.0, std::abs(a(i, j)))) return false;
        }
    return true;
}

SymMatrix::SymMatrix(Matrix m, double sym_tol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1) {
        throw DimensionMismatchError("SymMatrix: matrix must be square and nonempty");
    }
    if (!is_symmetric(m_, sym_tol)) {
        throw NotSymmetricError("SymMatrix: input exceeds symmetry tolerance " +
                                std::to_string(sym_tol));
    }
}

Matrix Spectrum::reconstruct(const std::vector<double>& transformed) const {
    if (transformed.size() != eigenvalues.size()) {
        throw DimensionMismatchError("Spectrum::reconstruct: wrong eigenvalue count");
    }
    const std::size_t n = eigenvalues.size();
    Matrix scaled = eigenvectors;
    for (std::size_t j = 0; j < n; ++j) kernels::scal(transformed[j], scaled.col(j), n);
    return matmul(scaled, eigenvectors, false, true);
}

EmbeddingBatch::EmbeddingBatch(Matrix z_in, bool unit_norm_in)
    : z(std::move(z_in)), unit_norm(unit_norm_in) {
    if (z.rows() < 1 || z.cols() < 1) {
        throw DimensionMismatchError("EmbeddingBatch: d and B must be at least 1");
    }
    if (unit_norm) {
        for (std::size_t j = 0; j < z.cols(); ++j) {
            const double norm = std::sqrt(kernels::dot(z.col(j), z.col(j), z.rows()));
            if (std::abs(norm - 1.0) > 1e-8) {
                throw PreconditionError("EmbeddingBatch: column " + std::to_string(j) +
                                        " norm " + std::to_string(norm) + " is not 1");
            }
        }
    }
}

void normalize_columns(Matrix& z) {
    for (std::size_t j = 0; j < z.cols(); ++j) {
        const double norm = std::sqrt(kernels::dot(z.col(j), z.col(j), z.rows()));
        if (norm > 0.0) kernels::scal(1.0 / norm, z.col(j), z.rows());
    }
}

}  // namespace matrixinfo
