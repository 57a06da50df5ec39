#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>

#include "dstbc/linalg.hpp"

using namespace dstbc;

namespace {

CMat random_matrix(std::size_t rows, std::size_t cols, unsigned seed) {
    std::mt19937 eng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    CMat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = cx(dist(eng), dist(eng));
    return m;
}

CMat random_hermitian(std::size_t n, unsigned seed) {
    CMat a = random_matrix(n, n, seed);
    return a + a.adjoint();
}

CMat random_spd(std::size_t n, unsigned seed) {
    CMat a = random_matrix(n, n, seed);
    CMat m = a.adjoint() * a;
    for (std::size_t i = 0; i < n; ++i) m(i, i) += 0.5;  // keep well conditioned
    return m;
}

double reconstruction_error(const CMat& a, const HermitianEigen& e) {
    const std::size_t n = a.rows();
    CMat d(n, n);
    for (std::size_t i = 0; i < n; ++i) d(i, i) = e.values[i];
    const CMat r = e.vectors * d * e.vectors.adjoint() - a;
    return r.max_abs();
}

}  // namespace

TEST_CASE("eigendecomposition reconstructs Hermitian matrices") {
    for (std::size_t n = 2; n <= 8; ++n) {
        for (unsigned seed = 0; seed < 5; ++seed) {
            const CMat a = random_hermitian(n, 100 * static_cast<unsigned>(n) + seed);
            const HermitianEigen e = hermitian_eigen(a);
            CHECK(reconstruction_error(a, e) < 1e-11 * std::max(1.0, a.frobenius()));
            for (std::size_t i = 1; i < n; ++i) CHECK(e.values[i - 1] <= e.values[i]);
            const CMat vhv = e.vectors.adjoint() * e.vectors - CMat::identity(n);
            CHECK(vhv.max_abs() < 1e-11);
        }
    }
}

TEST_CASE("eigenvalues of a diagonal matrix") {
    CMat a(3, 3);
    a(0, 0) = 5.0;
    a(1, 1) = -1.0;
    a(2, 2) = 2.0;
    const HermitianEigen e = hermitian_eigen(a);
    CHECK(e.values[0] == Catch::Approx(-1.0));
    CHECK(e.values[1] == Catch::Approx(2.0));
    CHECK(e.values[2] == Catch::Approx(5.0));
}

TEST_CASE("inverse square root whitens") {
    CHECK((inverse_sqrt(CMat::identity(3)) - CMat::identity(3)).max_abs() < 1e-12);

    CMat four = CMat::identity(3);
    four *= 4.0;
    CMat expect = CMat::identity(3);
    expect *= 0.5;
    CHECK((inverse_sqrt(four) - expect).max_abs() < 1e-12);

    for (unsigned seed = 0; seed < 10; ++seed) {
        const CMat omega = random_spd(5, seed);
        const CMat w = inverse_sqrt(omega);
        const CMat eye = w * omega * w.adjoint();
        CHECK((eye - CMat::identity(5)).max_abs() < 1e-10);
    }
}

TEST_CASE("non positive definite matrices are rejected") {
    CMat bad(2, 2);
    bad(0, 0) = 1.0;
    bad(1, 1) = 1e-14;
    CHECK_THROWS_AS(inverse_sqrt(bad), std::runtime_error);

    CMat neg(2, 2);
    neg(0, 0) = 1.0;
    neg(1, 1) = -1.0;
    CHECK_THROWS_AS(inverse_sqrt(neg), std::runtime_error);
    CHECK_THROWS_AS(hermitian_inverse(neg), std::runtime_error);
}

TEST_CASE("hermitian inverse and square root") {
    for (unsigned seed = 20; seed < 25; ++seed) {
        const CMat omega = random_spd(4, seed);
        CHECK((hermitian_inverse(omega) * omega - CMat::identity(4)).max_abs() < 1e-10);
        const CMat s = hermitian_sqrt(omega);
        CHECK((s * s - omega).max_abs() < 1e-10);
    }
}

TEST_CASE("rank via singular values") {
    CHECK(matrix_rank(CMat::identity(4)) == 4);
    CHECK(matrix_rank(CMat(3, 5)) == 0);

    // Outer product has rank one.
    CMat u = random_matrix(4, 1, 3);
    CMat v = random_matrix(1, 3, 4);
    CHECK(matrix_rank(u * v) == 1);

    // Two independent outer products have rank two.
    CMat w = random_matrix(4, 1, 5) * random_matrix(1, 3, 6);
    CHECK(matrix_rank(u * v + w) == 2);

    const CMat tall = random_matrix(6, 3, 7);
    CHECK(matrix_rank(tall) == 3);
}

TEST_CASE("matrix arithmetic basics") {
    CMat a(2, 3);
    a(0, 0) = cx(1.0, 1.0);
    a(1, 2) = cx(0.0, -2.0);
    const CMat at = a.adjoint();
    CHECK(at.rows() == 3);
    CHECK(at(0, 0) == cx(1.0, -1.0));
    CHECK(at(2, 1) == cx(0.0, 2.0));

    const cvec y = a * cvec{1.0, 0.0, cx(0.0, 1.0)};
    CHECK(std::abs(y[0] - cx(1.0, 1.0)) < 1e-15);
    CHECK(std::abs(y[1] - cx(2.0, 0.0)) < 1e-15);

    CHECK_THROWS_AS(a * CMat(2, 2), std::invalid_argument);
    CHECK_THROWS_AS(a * cvec{1.0}, std::invalid_argument);
    CHECK_THROWS_AS(hermitian_eigen(a), std::invalid_argument);
}
