#include <doctest.h>

#include <cmath>

#include "core/error.hpp"
#include "core/tensor.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace mdne;
using mdne::testing::Rng;

TEST_CASE("matmul with the identity returns the other operand") {
    Rng rng(1);
    const Matrix m = testing::random_matrix(rng, 3, 4);
    Matrix eye(3, 3);
    for (std::size_t i = 0; i < 3; ++i) eye(i, i) = 1.0;
    CHECK(matmul(eye, m) == m);
    const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
    CHECK(matmul(a, Matrix::from_rows({{1, 0}, {0, 1}})) == a);
}

TEST_CASE("matmul equals the triple loop") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const Matrix a = testing::random_matrix(rng, 5, 4);
        const Matrix b = testing::random_matrix(rng, 4, 3);
        const Matrix got = matmul(a, b);
        const Matrix want = oracle::matmul(a, b);
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(got.values()[i] == doctest::Approx(want.values()[i]).epsilon(1e-14));
    }
}

TEST_CASE("matmul sparse and blocked paths agree with the oracle on larger shapes") {
    Rng rng(3);
    for (double density : {0.01, 0.2, 1.0}) {
        Matrix a = testing::random_binary(rng, 70, 300, density);
        const Matrix b = testing::random_matrix(rng, 300, 530);
        const Matrix got = matmul(a, b);
        const Matrix want = oracle::matmul(a, b);
        double worst = 0.0;
        for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got.values()[i] - want.values()[i]));
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("threaded matmul is bit-identical to single-threaded") {
    Rng rng(4);
    const Matrix a = testing::random_matrix(rng, 64, 100);
    const Matrix b = testing::random_matrix(rng, 100, 40);
    CHECK(matmul(a, b, 1) == matmul(a, b, 4));
    CHECK(matmul_tn(a, a, 1) == matmul_tn(a, a, 3));
    CHECK(matmul_nt(a, a, 1) == matmul_nt(a, a, 2));
}

TEST_CASE("transposed products match explicit transposes") {
    Rng rng(5);
    const Matrix a = testing::random_matrix(rng, 6, 5);
    const Matrix b = testing::random_matrix(rng, 6, 3);
    const Matrix c = testing::random_matrix(rng, 4, 5);
    const Matrix tn = matmul_tn(a, b);
    const Matrix tn_want = oracle::matmul(transpose(a), b);
    for (std::size_t i = 0; i < tn.size(); ++i) CHECK(tn.values()[i] == doctest::Approx(tn_want.values()[i]).epsilon(1e-14));
    const Matrix nt = matmul_nt(a, c);
    const Matrix nt_want = oracle::matmul(a, transpose(c));
    for (std::size_t i = 0; i < nt.size(); ++i) CHECK(nt.values()[i] == doctest::Approx(nt_want.values()[i]).epsilon(1e-14));
}

TEST_CASE("matmul rejects mismatched inner dimensions") {
    CHECK_THROWS_AS(matmul(Matrix(2, 3), Matrix(2, 3)), ShapeError);
    CHECK_THROWS_AS(hadamard(Matrix(2, 3), Matrix(3, 2)), ShapeError);
}

TEST_CASE("matmul is associative within 1e-9 on random small matrices") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        const std::size_t p = testing::pick(rng, 1, 6), q = testing::pick(rng, 1, 6);
        const std::size_t r = testing::pick(rng, 1, 6), s = testing::pick(rng, 1, 6);
        const Matrix a = testing::random_matrix(rng, p, q);
        const Matrix b = testing::random_matrix(rng, q, r);
        const Matrix c = testing::random_matrix(rng, r, s);
        const Matrix left = matmul(matmul(a, b), c);
        const Matrix right = matmul(a, matmul(b, c));
        for (std::size_t i = 0; i < left.size(); ++i) CHECK(std::abs(left.values()[i] - right.values()[i]) < 1e-9);
    }
}

TEST_CASE("sigmoid values") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(std::abs(sigmoid(1e6) - 1.0) < 1e-12);
    CHECK(sigmoid(-1e6) >= 0.0);
    // 40-digit evaluation: 0.8807970779778824440597...
    CHECK(sigmoid(2.0) == doctest::Approx(0.8807970779778824).epsilon(1e-15));
    const Matrix s = sigmoid(Matrix::from_rows({{-800.0, 0.0, 800.0}}));
    CHECK(all_finite(s.values()));
    CHECK(s(0, 1) == 0.5);
}

TEST_CASE("sigmoid is monotone") {
    Rng rng(6);
    for (int t = 0; t < 1000; ++t) {
        double x = testing::uniform(rng, -40, 40), y = testing::uniform(rng, -40, 40);
        if (x > y) std::swap(x, y);
        CHECK(sigmoid(x) <= sigmoid(y));
    }
}

TEST_CASE("hadamard examples") {
    const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
    CHECK(hadamard(a, Matrix(2, 2, 1.0)) == a);
    CHECK(hadamard(a, Matrix(2, 2, 0.0)) == Matrix(2, 2, 0.0));
    CHECK(hadamard(a, Matrix(2, 2, 2.0)) == Matrix::from_rows({{2, 4}, {6, 8}}));
}

TEST_CASE("frobenius_sq") {
    CHECK(frobenius_sq(Matrix(3, 3)) == 0.0);
    CHECK(frobenius_sq(Matrix::from_rows({{3, 4}})) == 25.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const Matrix a = testing::random_matrix(rng, 4, 4);
        double loop = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) loop += a(i, j) * a(i, j);
        }
        CHECK(std::abs(frobenius_sq(a) - loop) < 1e-12);
        // Same summation order, so exactly equal.
        const Matrix sq = hadamard(a, a);
        double summed = 0.0;
        for (double v : sq.values()) summed += v;
        CHECK(frobenius_sq(a) == summed);
    }
}

TEST_CASE("helpers: concat, slice, gather, column sums") {
    const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
    const Matrix b = Matrix::from_rows({{5}, {6}});
    const Matrix ab = hconcat(a, b);
    CHECK(ab == Matrix::from_rows({{1, 2, 5}, {3, 4, 6}}));
    CHECK(column_slice(ab, 1, 2) == Matrix::from_rows({{2, 5}, {4, 6}}));
    const std::vector<std::size_t> rows{1, 0, 1};
    CHECK(gather_rows(a, rows) == Matrix::from_rows({{3, 4}, {1, 2}, {3, 4}}));
    CHECK(column_sums(a) == std::vector<double>{4, 6});
    Matrix c = a;
    const std::vector<double> bias{10, 20};
    add_row_vector(c, bias);
    CHECK(c == Matrix::from_rows({{11, 22}, {13, 24}}));
    CHECK_THROWS_AS(hconcat(a, Matrix(3, 1)), ShapeError);
    CHECK_THROWS_AS(column_slice(a, 1, 2), ShapeError);
}
