#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <vector>

#include "dstbc/ofdm.hpp"
#include "support/test_helpers.hpp"

using namespace dstbc;
using testsupport::max_abs_diff;
using testsupport::naive_dft;
using testsupport::naive_idft;
using testsupport::random_block;

TEST_CASE("dft of an impulse is flat") {
    const cvec x = {1.0, 0.0, 0.0, 0.0};
    const cvec y = dft(x);
    for (const auto& v : y) CHECK(std::abs(v - cx(0.5, 0.0)) < 1e-12);
}

TEST_CASE("dft of all-ones concentrates at DC") {
    const cvec x = {1.0, 1.0, 1.0, 1.0};
    const cvec y = dft(x);
    CHECK(std::abs(y[0] - cx(2.0, 0.0)) < 1e-12);
    for (std::size_t k = 1; k < 4; ++k) CHECK(std::abs(y[k]) < 1e-12);
}

TEST_CASE("idft recovers all-ones from a DC spike") {
    const cvec y = idft({2.0, 0.0, 0.0, 0.0});
    for (const auto& v : y) CHECK(std::abs(v - cx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("dft and idft match the direct-summation oracle") {
    for (std::size_t n : {std::size_t{4}, std::size_t{64}, std::size_t{256}, std::size_t{1024}}) {
        const cvec x = random_block(n, 100 + static_cast<unsigned>(n));
        CHECK(max_abs_diff(dft(x), naive_dft(x)) < 1e-10);
        CHECK(max_abs_diff(idft(x), naive_idft(x)) < 1e-10);
    }
}

TEST_CASE("idft inverts dft") {
    for (unsigned seed = 0; seed < 20; ++seed) {
        const cvec x = random_block(64, seed);
        CHECK(max_abs_diff(idft(dft(x)), x) < 1e-10);
        CHECK(max_abs_diff(dft(idft(x)), x) < 1e-10);
    }
}

TEST_CASE("transforms preserve energy") {
    for (std::size_t n : {std::size_t{4}, std::size_t{64}, std::size_t{256}}) {
        const cvec x = random_block(n, 7 + static_cast<unsigned>(n));
        double ex = 0.0, ey = 0.0;
        const cvec y = dft(x);
        for (std::size_t i = 0; i < n; ++i) {
            ex += std::norm(x[i]);
            ey += std::norm(y[i]);
        }
        CHECK(ex == Catch::Approx(ey).epsilon(1e-10));
    }
}

TEST_CASE("zeta reverses cyclically, fixing index 0") {
    const cvec x = {1.0, 2.0, 3.0, 4.0};
    const cvec z = zeta(x);
    CHECK(z == cvec{1.0, 4.0, 3.0, 2.0});
    CHECK(zeta(z) == x);
}

TEST_CASE("transform identity suite") {
    // The three conjugation/reversal identities plus dft∘dft = zeta, each over
    // 100 random blocks for every size.
    for (std::size_t n : {std::size_t{4}, std::size_t{64}, std::size_t{256}}) {
        for (unsigned seed = 0; seed < 100; ++seed) {
            const cvec x = random_block(n, seed * 3 + static_cast<unsigned>(n));
            cvec cxj = x;
            for (auto& v : cxj) v = std::conj(v);

            cvec lhs = dft(x);
            for (auto& v : lhs) v = std::conj(v);
            CHECK(max_abs_diff(lhs, idft(cxj)) < 1e-10);

            lhs = idft(x);
            for (auto& v : lhs) v = std::conj(v);
            CHECK(max_abs_diff(lhs, dft(cxj)) < 1e-10);

            CHECK(max_abs_diff(dft(zeta(dft(x))), x) < 1e-10);
            CHECK(max_abs_diff(dft(dft(x)), zeta(x)) < 1e-10);
        }
    }
}

TEST_CASE("cyclic delay theorem") {
    const std::size_t n = 64;
    const cvec x = random_block(n, 42);
    const cvec base = dft(x);
    for (long d : {0L, 1L, 5L, 16L, 63L, -3L}) {
        const cvec shifted = dft(cyclic_delay(x, d));
        for (std::size_t k = 0; k < n; ++k) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) * static_cast<double>(d) /
                               static_cast<double>(n);
            const cx expect = base[k] * cx(std::cos(ang), std::sin(ang));
            CHECK(std::abs(shifted[k] - expect) < 1e-10);
        }
    }
}

TEST_CASE("cyclic delay rotates right") {
    const cvec x = {1.0, 2.0, 3.0, 4.0};
    CHECK(cyclic_delay(x, 1) == cvec{4.0, 1.0, 2.0, 3.0});
    CHECK(cyclic_delay(x, -1) == cvec{2.0, 3.0, 4.0, 1.0});
    CHECK(cyclic_delay(x, 4) == x);
}

TEST_CASE("cyclic prefix add and remove") {
    const cvec x = {1.0, 2.0, 3.0, 4.0};
    const CpBlock b = add_cp(x, 2);
    CHECK(b.samples == cvec{3.0, 4.0, 1.0, 2.0, 3.0, 4.0});
    CHECK(has_valid_prefix(b));
    CHECK(remove_cp(b) == x);

    CHECK(add_cp(x, 0).samples == x);
    CHECK(add_cp(x, 4).samples.size() == 8);
    CHECK(remove_cp(add_cp(x, 4)) == x);
}

TEST_CASE("framing errors") {
    const cvec x = {1.0, 2.0, 3.0, 4.0};
    CHECK_THROWS_AS(add_cp(x, 5), std::invalid_argument);
    CpBlock bogus;
    bogus.samples = {1.0, 2.0, 3.0};
    bogus.cp_len = 5;
    CHECK_THROWS_AS(remove_cp(bogus), std::runtime_error);
}

TEST_CASE("transform size must be a power of two at least 2") {
    CHECK_THROWS_AS(dft(cvec{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(dft(cvec{1.0, 2.0, 3.0}), std::invalid_argument);
    CHECK_THROWS_AS(idft(cvec(6, cx{})), std::invalid_argument);
    CHECK_THROWS_AS(dft(cvec{}), std::invalid_argument);
}

TEST_CASE("dest_shift rotates the tail to the head") {
    const cvec x = {1.0, 2.0, 3.0, 4.0};
    CHECK(dest_shift(x, 1) == cvec{4.0, 1.0, 2.0, 3.0});
    CHECK(dest_shift(x, 0) == x);
    CHECK_THROWS_AS(dest_shift(x, 5), std::invalid_argument);
}
