#include <doctest.h>

#include <random>

#include "mtc/error.hpp"
#include "mtc/kernels.hpp"
#include "mtc/matrix.hpp"
#include "oracles.hpp"

using mtc::Matrix;

TEST_CASE("construction and element access") {
    Matrix m{{1, 2, 3}, {4, 5, 6}};
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 3);
    CHECK(m(1, 2) == 6.0);
    CHECK(m.row(1)[0] == 4.0);
    CHECK(Matrix::identity(3)(1, 1) == 1.0);
    CHECK(Matrix::identity(3)(0, 1) == 0.0);
    CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1, 2, 3}), mtc::ShapeError);
}

TEST_CASE("slices and transpose") {
    Matrix m{{1, 2, 3}, {4, 5, 6}};
    CHECK(m.columns(1, 2) == Matrix{{2, 3}, {5, 6}});
    CHECK(m.rows_slice(1, 1) == Matrix{{4, 5, 6}});
    CHECK(m.transpose() == Matrix{{1, 4}, {2, 5}, {3, 6}});
    CHECK_THROWS(m.columns(2, 2));
}

TEST_CASE("products agree with the naive oracle on every kernel table") {
    std::mt19937_64 rng(7);
    const auto before = mtc::kernels::active().isa;
    for (auto isa : mtc::kernels::available()) {
        mtc::kernels::set_active(isa);
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t r = 1 + rng() % 9, k = 1 + rng() % 11, c = 1 + rng() % 13;
            const Matrix a = oracle::random_matrix(rng, r, k);
            const Matrix b = oracle::random_matrix(rng, k, c);
            CHECK(mtc::max_abs_diff(mtc::multiply(a, b), oracle::mul(a, b)) < 1e-12);
            const Matrix at = oracle::transpose(a);
            CHECK(mtc::max_abs_diff(mtc::multiply_at_b(at, b), oracle::mul(a, b)) < 1e-12);
            const Matrix bt = oracle::transpose(b);
            CHECK(mtc::max_abs_diff(mtc::multiply_a_bt(a, bt), oracle::mul(a, b)) < 1e-12);
        }
    }
    mtc::kernels::set_active(before);
}

TEST_CASE("products are bit-identical across kernel tables") {
    std::mt19937_64 rng(8);
    const Matrix a = oracle::random_matrix(rng, 31, 47);
    const Matrix b = oracle::random_matrix(rng, 47, 29);
    const auto before = mtc::kernels::active().isa;
    mtc::kernels::set_active(mtc::kernels::Isa::scalar);
    const Matrix ref1 = mtc::multiply(a, b), ref2 = mtc::multiply_a_bt(a, a), ref3 = mtc::multiply_at_b(a, a);
    for (auto isa : mtc::kernels::available()) {
        mtc::kernels::set_active(isa);
        CHECK(mtc::multiply(a, b) == ref1);
        CHECK(mtc::multiply_a_bt(a, a) == ref2);
        CHECK(mtc::multiply_at_b(a, a) == ref3);
    }
    mtc::kernels::set_active(before);
}

TEST_CASE("shape mismatches are rejected") {
    Matrix a(2, 3), b(2, 3);
    CHECK_THROWS_AS(mtc::multiply(a, b), mtc::ShapeError);
    CHECK_THROWS_AS(a + Matrix(3, 2), mtc::ShapeError);
    CHECK_THROWS_AS(mtc::max_abs_diff(a, Matrix(3, 2)), mtc::ShapeError);
}

TEST_CASE("reductions") {
    Matrix m{{1, 2}, {3, 4}};
    CHECK(mtc::frobenius_sq(m) == 30.0);
    CHECK(mtc::trace(m) == 5.0);
    CHECK(mtc::asymmetry(m) == 1.0);
    CHECK(mtc::max_abs_diff(m, 2.0 * m) == 4.0);
    CHECK((m - m) == Matrix(2, 2));
}

TEST_CASE("Eigen conversion round-trips") {
    std::mt19937_64 rng(9);
    const Matrix a = oracle::random_matrix(rng, 4, 6);
    const Eigen::MatrixXd e = mtc::to_eigen(a);
    CHECK(e(2, 5) == a(2, 5));
    CHECK(mtc::from_eigen(e) == a);
}
