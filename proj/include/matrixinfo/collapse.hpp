#pragma once

#include <cstdint>
#include <vector>

#include "matrixinfo/matrix.hpp"

namespace matrixinfo {

/// d x n feature columns with an integer class id per column.
struct LabeledEmbeddings {
    Matrix z;
    std::vector<std::uint32_t> labels;

    /// Validates that labels match the column count and that every class id
    /// in [0, num_classes) occurs at least once.
    LabeledEmbeddings(Matrix z, std::vector<std::uint32_t> labels);

    std::size_t d() const { return z.rows(); }
    std::size_t samples() const { return z.cols(); }
    std::size_t num_classes() const { return num_classes_; }

private:
    std::size_t num_classes_ = 0;
};

struct IntraClassErank {
    double mean;                     // uniform average over classes
    std::vector<double> per_class;   // 0 marks a fully collapsed class
};

/// Mean effective rank of the within-class scatter matrices. A class whose
/// scatter is all-zero counts as 0: total collapse is exactly the state this
/// metric has to describe.
IntraClassErank intra_class_erank(const LabeledEmbeddings& data);

/// Effective rank of the scatter of class means around the global sample
/// mean. Needs at least two classes.
double inter_class_erank(const LabeledEmbeddings& data);

/// alpha * U * M where M = sqrt(K/(K-1)) (I - (1/K) 1 1t) and U is a d x K
/// matrix with orthonormal columns. The columns form a maximally separated
/// equiangular configuration with zero mean.
Matrix build_simplex_etf(std::size_t k, std::size_t d, double alpha, const Matrix& u);

/// Canonical embedding variant: alpha = 1, U = the first K coordinate axes.
Matrix build_simplex_etf(std::size_t k, std::size_t d);

struct EtfCheck {
    double erank;          // effective rank of the Gram matrix
    bool is_etf;           // spectral match to the simplex frame
    double gram_residual;  // worst relative eigenvalue deviation
};

/// Tests unit-norm zero-mean columns for the simplex-frame spectrum: K-1
/// Gram eigenvalues at K/(K-1) and one at zero (relative tolerance 1e-6).
EtfCheck etf_erank_check(const Matrix& v);

/// Effective rank of the Gram matrix Zt Z; cross-checked against Z Zt, which
/// shares the nonzero spectrum.
double gram_erank(const EmbeddingBatch& z);

struct CollapseReport {
    double intra_class_erank;
    double inter_class_erank;
    double global_erank;
    double vne_global;
    double mkl_to_uniform;
    std::vector<double> per_class_eranks;
};

/// Full diagnostic bundle over one labeled batch: the class-conditional
/// eranks plus the global spectrum statistics of (1/n) Z Zt.
CollapseReport collapse_report(const LabeledEmbeddings& data);

}  // namespace matrixinfo
