#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace matrixinfo {

/// Dense column-major matrix of doubles. Value type; all library code
/// consumes and produces these.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    /// Row-major brace construction for small literals in tests and docs:
    /// Matrix::from_rows({{1, 2}, {3, 4}}).
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix identity(std::size_t n);
    static Matrix diagonal(const std::vector<double>& d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double* col(std::size_t j) { return data_.data() + j * rows_; }
    const double* col(std::size_t j) const { return data_.data() + j * rows_; }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double a, const Matrix& m);

Matrix transpose(const Matrix& a);

/// C = op(A) * op(B) with op in {identity, transpose}. Inner loops run on the
/// dispatched kernels.
Matrix matmul(const Matrix& a, const Matrix& b, bool trans_a = false, bool trans_b = false);

double trace(const Matrix& a);
double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);

/// (A + At) / 2. Callers symmetrize deliberately; nothing in the library
/// symmetrizes behind the caller's back.
Matrix symmetrize(const Matrix& a);

bool is_symmetric(const Matrix& a, double tol);

inline constexpr double kDefaultSymTol = 1e-10;

/// Square matrix checked to be symmetric within `sym_tol` at construction.
class SymMatrix {
public:
    explicit SymMatrix(Matrix m, double sym_tol = kDefaultSymTol);

    std::size_t n() const { return m_.rows(); }
    const Matrix& matrix() const { return m_; }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

private:
    Matrix m_;
};

/// Eigendecomposition of a SymMatrix: eigenvalues sorted descending,
/// eigenvector columns orthonormal.
struct Spectrum {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;

    std::size_t n() const { return eigenvalues.size(); }
    double min_eigenvalue() const { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }
    /// V * diag(f(lambda)) * Vt for an entrywise-transformed spectrum.
    Matrix reconstruct(const std::vector<double>& transformed) const;
};

/// d x B matrix of embedding columns (the features of one batch).
struct EmbeddingBatch {
    Matrix z;
    bool unit_norm = false;

    EmbeddingBatch() = default;
    /// Validates the unit-norm invariant (tolerance 1e-8) when flagged.
    explicit EmbeddingBatch(Matrix z, bool unit_norm = false);

    std::size_t d() const { return z.rows(); }
    std::size_t batch() const { return z.cols(); }
};

/// Normalizes every column to the unit sphere. Columns of zero norm are left
/// untouched.
void normalize_columns(Matrix& z);

}  // namespace matrixinfo
