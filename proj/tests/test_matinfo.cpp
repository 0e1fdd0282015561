#include "matrixinfo/matinfo.hpp"

#include <cmath>
#include <limits>

#include "doctest.h"
#include "matrixinfo/errors.hpp"
#include "support/test_helpers.hpp"

using namespace matrixinfo;
using doctest::Approx;

TEST_CASE("matrix_entropy examples") {
    CHECK(matrix_entropy(SymMatrix(Matrix::identity(2))) == Approx(2.0));
    CHECK(matrix_entropy(SymMatrix(Matrix(3, 3))) == Approx(0.0));
    CHECK(matrix_entropy(SymMatrix(Matrix::diagonal({2.0, 1.0}))) ==
          Approx(3.0 - 2.0 * std::log(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(matrix_entropy(SymMatrix(Matrix::diagonal({1.0, -1.0}))), NotPsdError);
}

TEST_CASE("vne examples") {
    const std::size_t d = 5;
    CHECK(vne(SymMatrix((1.0 / d) * Matrix::identity(d))) ==
          Approx(std::log(static_cast<double>(d))).epsilon(1e-14));
    CHECK(vne(SymMatrix(Matrix::diagonal({1.0, 0.0, 0.0}))) == Approx(0.0));
    CHECK(vne(SymMatrix(Matrix::diagonal({0.5, 0.5, 0.0}))) ==
          Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("mkl golden values from the 2x2 worked example") {
    const SymMatrix id2(Matrix::identity(2));
    const SymMatrix q1(Matrix::from_rows({{1.0, 0.96}, {0.96, 1.0}}));
    CHECK(mkl(id2, q1) == Approx(2.55).epsilon(0.004));

    const SymMatrix p2(Matrix::from_rows({{1.36, 0.48}, {0.48, 0.64}}));
    const SymMatrix q2(Matrix::from_rows({{0.64, 0.48}, {0.48, 1.36}}));
    CHECK(mkl(p2, q2) == Approx(0.60).epsilon(0.017));
    // Frozen full-precision values.
    CHECK(mkl(id2, q1) == Approx(2.5459313516257733).epsilon(1e-12));
    CHECK(mkl(p2, q2) == Approx(0.59887916400379226).epsilon(1e-12));
}

TEST_CASE("mkl self-divergence is zero") {
    auto gen = testing::rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const SymMatrix p(testing::random_spd(4, gen));
        CHECK(std::abs(mkl(p, p)) <= 1e-10);
    }
}

TEST_CASE("mkl reports +inf when Q collapses where P has mass") {
    const SymMatrix p(Matrix::identity(2));
    const SymMatrix q(Matrix::diagonal({1.0, 0.0}));
    CHECK(std::isinf(mkl(p, q)));
    // No P-mass in the collapsed direction keeps it finite.
    const SymMatrix p_aligned(Matrix::diagonal({1.0, 0.0}));
    CHECK(std::isfinite(mkl(p_aligned, q)));
}

TEST_CASE("mce examples and decomposition identity") {
    const SymMatrix id2(Matrix::identity(2));
    CHECK(mce(id2, id2) == Approx(2.0));

    const SymMatrix q1(Matrix::from_rows({{1.0, 0.96}, {0.96, 1.0}}));
    CHECK(mce(id2, q1) == Approx(-std::log(0.0784) + 2.0).epsilon(1e-10));

    auto gen = testing::rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + gen() % 5;
        const SymMatrix p(testing::random_spd(n, gen));
        const SymMatrix q(testing::random_spd(n, gen));
        CHECK(std::abs(mce(p, q) - mkl(p, q) - matrix_entropy(p)) <= 1e-9);
        CHECK(mce(p, p) == Approx(matrix_entropy(p)).epsilon(1e-10));
    }
}

TEST_CASE("erank examples") {
    CHECK(erank(Matrix::identity(6)) == Approx(6.0).epsilon(1e-12));
    CHECK(erank(Matrix::diagonal({1.0, 0.0})) == Approx(1.0).epsilon(1e-12));
    CHECK(erank(Matrix::diagonal({2.0, 1.0, 1.0})) ==
          Approx(std::pow(2.0, 1.5)).epsilon(1e-12));
    CHECK_THROWS_AS(erank(Matrix(3, 3)), ZeroMatrixError);
    CHECK(erank_or_zero(Matrix(3, 3)) == 0.0);
}

TEST_CASE("erank bounds and scale invariance") {
    auto gen = testing::rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + gen() % 6;
        const Matrix a = testing::random_matrix(n, n, gen);
        const double er = erank(a);
        CHECK(er >= 1.0 - 1e-12);
        CHECK(er <= static_cast<double>(n) + 1e-12);
        CHECK(erank(3.7 * a) == Approx(er).epsilon(1e-9));
    }

    // erank never exceeds the rank: rank-r PSD matrices in dimension n > r.
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 4 + gen() % 3;
        const std::size_t r = 1 + gen() % 3;
        const Matrix z = testing::random_matrix(n, r, gen);
        const Matrix low_rank = matmul(z, z, false, true);
        CHECK(erank(low_rank) <= static_cast<double>(r) + 1e-9);
    }
}

TEST_CASE("erank handles non-symmetric input through singular values") {
    // Rotation by 90 degrees has both singular values 1.
    const Matrix rot = Matrix::from_rows({{0.0, -1.0}, {1.0, 0.0}});
    CHECK(erank(rot) == Approx(2.0).epsilon(1e-10));
    // Symmetric indefinite input uses absolute eigenvalues.
    CHECK(erank(Matrix::diagonal({1.0, -1.0})) == Approx(2.0).epsilon(1e-10));
}

TEST_CASE("mkl is invariant under a shared orthogonal conjugation") {
    auto gen = testing::rng(37);
    const std::size_t n = 5;
    const SymMatrix p(testing::random_spd(n, gen));
    const SymMatrix q(testing::random_spd(n, gen));
    const Matrix u = testing::random_orthogonal(n, gen);
    const double base = mkl(p, q);

    const auto conjugate = [&](const Matrix& m) {
        return symmetrize(matmul(matmul(u, m), u, false, true));
    };
    const double rotated = mkl(SymMatrix(conjugate(p.matrix())), SymMatrix(conjugate(q.matrix())));
    CHECK(rotated == Approx(base).epsilon(1e-9));
}

TEST_CASE("erank, mkl-to-uniform, and vne identity on unit-norm batches") {
    auto gen = testing::rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 2 + gen() % 15;  // up to 16
        const std::size_t b = d + gen() % (2 * d + 1);
        Matrix z = testing::random_matrix(d, b, gen);
        normalize_columns(z);
        Matrix moment = matmul(z, z, false, true);
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t i = 0; i < d; ++i) moment(i, j) /= static_cast<double>(b);
        const SymMatrix sym_moment(symmetrize(moment));

        const double er = erank(sym_moment.matrix());
        const double divergence = mkl(sym_moment, SymMatrix((1.0 / d) * Matrix::identity(d)));
        CHECK(er * std::exp(divergence) == Approx(static_cast<double>(d)).epsilon(1e-9));
        CHECK(er == Approx(std::exp(vne(sym_moment))).epsilon(1e-9));
    }
}
