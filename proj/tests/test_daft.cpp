#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "agile_afdm/daft.hpp"
#include "agile_afdm/fft.hpp"
#include "oracles.hpp"

using namespace agile_afdm;

namespace {

double rel_err(const CVec& a, const CVec& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("idaft matches the direct double sum") {
    const CVec x = oracle::random_block(8, 3);
    const TimeSignal s = idaft(SymbolBlock(x), 0.37, 0.11);
    CHECK(rel_err(s.values(), oracle::idaft(x, 0.37, 0.11)) < 1e-12);

    const CVec y = oracle::random_block(64, 4);
    CHECK(rel_err(idaft(SymbolBlock(y), 0.813, 0.271).values(), oracle::idaft(y, 0.813, 0.271)) < 1e-11);
}

TEST_CASE("impulse input gives a constant-modulus chirp") {
    CVec x(16, 0.0);
    x[0] = 1.0;
    const TimeSignal s = idaft(SymbolBlock(x), 0.29, 0.6);
    for (std::size_t n = 0; n < 16; ++n) {
        CHECK(std::abs(s[n]) == doctest::Approx(0.25).epsilon(1e-14));
        const cplx want = 0.25 * oracle::phasor(0.29 * double(n * n));
        CHECK(std::abs(s[n] - want) < 1e-13);
    }
}

TEST_CASE("c = (0,0) reduces to the DFT pair") {
    const CVec x = oracle::random_block(32, 5);
    const CVec s = idaft(SymbolBlock(x), 0.0, 0.0).values();
    // textbook inverse DFT
    for (std::size_t n = 0; n < 32; ++n) {
        cplx acc{};
        for (std::size_t m = 0; m < 32; ++m) acc += x[m] * oracle::phasor(double(n * m % 32) / 32.0);
        CHECK(std::abs(s[n] - acc / std::sqrt(32.0)) < 1e-12);
    }
    const CVec back = daft(TimeSignal(s), 0.0, 0.0).values();
    CHECK(rel_err(back, x) < 1e-12);
}

TEST_CASE("unitarity and Parseval over random (x, c)") {
    Stream rng(11, StreamTag::Test);
    double worst_rt = 0.0, worst_energy = 0.0, worst_parseval = 0.0;
    for (std::size_t n : {8u, 16u, 64u}) {
        for (int trial = 0; trial < 100; ++trial) {
            const CVec x = oracle::random_block(n, 12, std::uint64_t(trial) + 1000 * n);
            const ChirpParams c(rng.uniform(), rng.uniform());
            const TimeSignal s = idaft(SymbolBlock(x), c);
            worst_rt = std::max(worst_rt, rel_err(daft(s, c).values(), x));
            double ex = 0.0;
            for (const auto& v : x) ex += std::norm(v);
            worst_energy = std::max(worst_energy, std::abs(s.energy() - ex) / ex);
            const CVec r = oracle::random_block(n, 13, std::uint64_t(trial));
            double er = 0.0, ey = 0.0;
            for (const auto& v : r) er += std::norm(v);
            const SymbolBlock y = daft(TimeSignal(r), c);
            for (const auto& v : y.values()) ey += std::norm(v);
            worst_parseval = std::max(worst_parseval, std::abs(er - ey) / er);
        }
    }
    CHECK(worst_rt < 1e-10);
    CHECK(worst_energy < 1e-12);
    CHECK(worst_parseval < 1e-12);
}

TEST_CASE("daft matrix is unitary") {
    const Eigen::MatrixXcd a = daft_matrix(0.21, 0.77, 16);
    const Eigen::MatrixXcd id = a * a.adjoint();
    CHECK((id - Eigen::MatrixXcd::Identity(16, 16)).norm() < 1e-12);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(SymbolBlock(CVec{}), InvalidArgument);
    CHECK_THROWS_AS(SymbolBlock(CVec(3, 1.0)), InvalidArgument);
    CHECK_THROWS_AS(SymbolBlock(CVec{1.0, std::nan("")}), InvalidArgument);
    CHECK_THROWS_AS(daft(TimeSignal(CVec(8, 1.0)), ChirpParams(0.1, 0.2), 16), InvalidArgument);
    CHECK_THROWS_AS(ChirpParams(std::numeric_limits<double>::infinity(), 0.0), InvalidArgument);
}

TEST_CASE("chirp parameters reduce onto the unit torus") {
    const ChirpParams c(3.25, -0.75);
    CHECK(c.c1 == doctest::Approx(0.25));
    CHECK(c.c2 == doctest::Approx(0.25));
    CHECK(ChirpParams(-1e-18, 0.0).c1 < 1.0);
}

TEST_CASE("chirp-periodic prefix") {
    const CVec x = oracle::random_block(8, 21);
    const TimeSignal s = idaft(SymbolBlock(x), 0.3, 0.4);
    const TimeSignal p = append_cpp(s, 0.3, 2);
    REQUIRE(p.size() == 10);
    // n = -1: s[7] exp(-j2pi 0.3 (64 - 16))
    CHECK(std::abs(p[1] - s[7] * oracle::phasor(-0.3 * 48.0)) < 1e-12);
    CHECK(std::abs(p[0] - s[6] * oracle::phasor(-0.3 * 32.0)) < 1e-12);
    for (std::size_t n = 0; n < 8; ++n) CHECK(p[n + 2] == s[n]);

    SUBCASE("2 N c1 integer gives the cyclic prefix") {
        const double c1 = 3.0 / 16.0;
        const TimeSignal t = idaft(SymbolBlock(x), c1, 0.4);
        const TimeSignal q = append_cpp(t, c1, 3);
        for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(q[k] - t[5 + k]) < 1e-12);
    }
    SUBCASE("empty prefix is the identity") {
        CHECK(append_cpp(s, 0.3, 0).values() == s.values());
    }
    CHECK_THROWS_AS(append_cpp(s, 0.3, 8), InvalidArgument);
}

TEST_CASE("oversampled envelope") {
    const CVec x = oracle::random_block(16, 31);
    SUBCASE("L = 1 reproduces the sample moduli") {
        const TimeSignal e = oversampled_envelope(SymbolBlock(x), 0.2, 1);
        const TimeSignal s = idaft(SymbolBlock(x), 0.45, 0.2);
        for (std::size_t n = 0; n < 16; ++n) CHECK(std::abs(e[n]) == doctest::Approx(std::abs(s[n])).epsilon(1e-12));
    }
    SUBCASE("matches the continuous envelope at fractional times") {
        const TimeSignal e = oversampled_envelope(SymbolBlock(x), 0.2, 10);
        REQUIRE(e.size() == 160);
        for (std::size_t k = 0; k < 160; k += 7) {
            CHECK(std::norm(e[k]) == doctest::Approx(oracle::envelope_power(x, 0.2, double(k) / 10.0)).epsilon(1e-10));
        }
    }
    SUBCASE("single active symbol has constant modulus") {
        CVec y(16, 0.0);
        y[5] = 1.0;
        const TimeSignal e = oversampled_envelope(SymbolBlock(y), 0.37, 4);
        for (std::size_t k = 0; k < e.size(); ++k) CHECK(std::abs(e[k]) == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("oversampled peak is close to a 1000x denser grid") {
        // 16-QAM block
        Stream rng(32, StreamTag::Test);
        CVec q(16);
        for (auto& v : q) v = cplx(2.0 * double(rng.below(4)) - 3.0, 2.0 * double(rng.below(4)) - 3.0);
        const TimeSignal e = oversampled_envelope(SymbolBlock(q), 0.2, 10);
        double peak = 0.0, mean = 0.0;
        for (std::size_t k = 0; k < e.size(); ++k) peak = std::max(peak, std::norm(e[k]));
        for (const auto& v : q) mean += std::norm(v);
        mean /= 16.0;
        const double coarse = 10.0 * std::log10(peak / mean);
        const double dense = oracle::papr_dense_db(q, 0.2, 16000);
        CHECK(dense >= coarse - 1e-9);
        CHECK(dense - coarse < 0.05);
    }
}

TEST_CASE("fft wrappers are unnormalised inverses") {
    CVec x = oracle::random_block(12, 41);
    CVec y = x;
    fft::forward_inplace(y);
    fft::inverse_inplace(y);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(y[i] / 12.0 - x[i]) < 1e-12);
}
