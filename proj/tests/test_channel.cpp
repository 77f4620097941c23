#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "agile_afdm/channel.hpp"
#include "agile_afdm/daft.hpp"
#include "oracles.hpp"

using namespace agile_afdm;

namespace {

PathSet table2_channel(std::uint64_t seed) {
    Stream rng(seed, StreamTag::Test, 7);
    PathSet ps;
    const double delays[3] = {1, 4, 5}, dopplers[3] = {0.1, 0.4, 0.7}, power[3] = {1.0, 0.2, 0.05};
    for (int i = 0; i < 3; ++i) ps.paths.push_back({rng.complex_normal(power[i]), delays[i], dopplers[i]});
    return ps;
}

// Transmit through the time-domain channel sample by sample and demodulate.
CVec simulate(const PathSet& ps, const CVec& x, double c1, double c2, std::size_t prefix) {
    const std::size_t n = x.size();
    const TimeSignal s = append_cpp(idaft(SymbolBlock(x), c1, c2), c1, prefix);
    CVec r(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (const auto& p : ps.paths) {
            const auto l = static_cast<std::size_t>(p.delay);
            r[k] += p.gain * oracle::phasor(-p.doppler * double(k) / double(n)) * s[prefix + k - l];
        }
    }
    return daft(TimeSignal(r), c1, c2).values();
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("dirichlet kernel") {
    for (double psi : {3.7, -2.2, 0.4, 15.999, 8.0}) {
        cplx direct{};
        for (int k = 0; k < 16; ++k) direct += oracle::phasor(-psi * k / 16.0);
        CHECK(std::abs(dirichlet_kernel(psi, 16) - direct) < 1e-12);
    }
    CHECK(std::abs(dirichlet_kernel(0.0, 16) - cplx(16.0)) < 1e-12);
    CHECK(std::abs(dirichlet_kernel(32.0, 16) - cplx(16.0)) < 1e-12);
    CHECK(std::abs(dirichlet_kernel(8.0, 16)) < 16.0);
    // derivative against a central difference
    const double h = 1e-6;
    const cplx fd = (dirichlet_kernel(3.7 + h, 16) - dirichlet_kernel(3.7 - h, 16)) / (2 * h);
    CHECK(std::abs(dirichlet_kernel_derivative(3.7, 16) - fd) < 1e-6 * std::abs(fd));
    CHECK(std::abs(kernel_F(2, 2, 0.0, 0.0, 0.3, 16) - cplx(16.0)) < 1e-12);
}

TEST_CASE("identity channel") {
    PathSet ps;
    ps.paths.push_back({1.0, 0.0, 0.0});
    const auto h = effective_comm_channel(ps, 0.37, 0.81, 16);
    CHECK(max_abs(h.h - Eigen::MatrixXcd::Identity(16, 16)) < 1e-12);
    const auto g = effective_sens_channel({1.0, 0.0, 0.0}, ChirpParams(0.2, 0.9), 16);
    CHECK(max_abs(g.h - Eigen::MatrixXcd::Identity(16, 16)) < 1e-12);
}

TEST_CASE("closed form equals the time-domain transmission") {
    const PathSet ps = table2_channel(1);
    const CVec x = oracle::random_block(64, 2);
    for (auto [c1, c2] : {std::pair{0.0, 0.0}, {1.0 / 128.0, 0.3}, {0.37, 0.11}, {0.9123, 0.55}}) {
        const auto h = effective_comm_channel(ps, c1, c2, 64);
        Eigen::VectorXcd xv(64);
        for (int i = 0; i < 64; ++i) xv(i) = x[std::size_t(i)];
        const Eigen::VectorXcd y = h.h * xv;
        const CVec want = simulate(ps, x, c1, c2, 10);
        double err = 0.0;
        for (int i = 0; i < 64; ++i) err = std::max(err, std::abs(y(i) - want[std::size_t(i)]));
        CHECK(err < 1e-8);
        // and against A Hcomm A^H from the library's time-domain matrices
        const Eigen::MatrixXcd a = daft_matrix(c1, c2, 64);
        const Eigen::MatrixXcd td = a * time_domain_comm_channel(ps, c1, 64) * a.adjoint();
        CHECK(max_abs(td - h.h) < 1e-8);
    }
}

TEST_CASE("periodicity in both chirp parameters") {
    const PathSet ps = table2_channel(3);
    Stream rng(4, StreamTag::Test);
    double worst = 0.0, worst_s = 0.0;
    for (int t = 0; t < 50; ++t) {
        const double c1 = rng.uniform(), c2 = rng.uniform();
        const double k = double(rng.below(7)) - 3.0, m = double(rng.below(7)) - 3.0;
        worst = std::max(worst, max_abs(effective_comm_channel(ps, c1, c2, 16).h -
                                        effective_comm_channel(ps, c1 + k, c2 + m, 16).h));
        // integer delay: the continuous-delay extension is not periodic in c1
        const SensingTarget tg{cplx(0.3, -1.1), 3.0, 0.27};
        worst_s = std::max(worst_s, max_abs(effective_sens_channel(tg, c1, c2, 16).h -
                                            effective_sens_channel(tg, c1 + k, c2 + m, 16).h));
    }
    CHECK(worst < 1e-10);
    CHECK(worst_s < 1e-10);
    CHECK(max_abs(effective_comm_channel(ps, 0.2, 0.4, 16).h - effective_comm_channel(ps, 3.2, -1.6, 16).h) < 1e-10);
}

TEST_CASE("sensing channel") {
    const SensingTarget t{cplx(0.6, 0.8), 4.0, 0.3};
    const auto h = effective_sens_channel(t, 0.5, 0.5, 64);
    for (int p = 0; p < 64; ++p) CHECK(h.h.row(p).norm() == doctest::Approx(1.0).epsilon(1e-9));
    const SensingTarget t2{cplx(1.2, 1.6), 4.0, 0.3};
    CHECK(max_abs(effective_sens_channel(t2, 0.5, 0.5, 64).h - 2.0 * h.h) < 1e-12);

    const CVec x = oracle::random_block(32, 5);
    for (double delay : {0.0, 2.0, 3.37}) {
        CVec u;
        sens_response(delay, 0.43, 0.71, 0.19, x, u);
        const auto g = effective_sens_channel({1.0, delay, 0.43}, 0.71, 0.19, 32);
        for (int p = 0; p < 32; ++p) {
            cplx acc{};
            for (int q = 0; q < 32; ++q) acc += g.h(p, q) * x[std::size_t(q)];
            CHECK(std::abs(acc - u[std::size_t(p)]) < 1e-11);
        }
    }
}

TEST_CASE("ici decomposition") {
    const CVec x = oracle::random_block(8, 6);
    SUBCASE("row-sum oracle") {
        Stream rng(7, StreamTag::Test);
        EffectiveChannel h{Eigen::MatrixXcd(8, 8)};
        for (int p = 0; p < 8; ++p)
            for (int q = 0; q < 8; ++q) h.h(p, q) = rng.complex_normal();
        const IciPowers pw = ici_decompose(h, SymbolBlock(x));
        for (int p = 0; p < 8; ++p) {
            cplx ici{};
            for (int q = 0; q < 8; ++q)
                if (q != p) ici += h.h(p, q) * x[std::size_t(q)];
            CHECK(pw.interference[std::size_t(p)] == doctest::Approx(std::norm(ici)).epsilon(1e-12));
            CHECK(pw.signal[std::size_t(p)] == doctest::Approx(std::norm(h.h(p, p) * x[std::size_t(p)])).epsilon(1e-12));
        }
    }
    SUBCASE("diagonal channel has no interference") {
        EffectiveChannel h{Eigen::MatrixXcd::Identity(8, 8) * cplx(0.5, 2.0)};
        const IciPowers pw = ici_decompose(h, SymbolBlock(x));
        for (double v : pw.interference) CHECK(v == 0.0);
    }
    SUBCASE("all-ones channel and an impulse") {
        EffectiveChannel h{Eigen::MatrixXcd::Ones(8, 8)};
        CVec e(8, 0.0);
        e[0] = 1.0;
        const IciPowers pw = ici_decompose(h, SymbolBlock(e));
        for (std::size_t p = 0; p < 8; ++p) {
            CHECK(pw.signal[p] == (p == 0 ? 1.0 : 0.0));
            CHECK(pw.interference[p] == (p == 0 ? 0.0 : 1.0));
        }
    }
    SUBCASE("fast split equals the dense one") {
        const PathSet ps = table2_channel(8);
        const CVec y = oracle::random_block(64, 9);
        Stream rng(10, StreamTag::Test);
        double worst = 0.0;
        for (int t = 0; t < 30; ++t) {
            const double c1 = rng.uniform(), c2 = rng.uniform();
            const IciPowers a = ici_decompose(effective_comm_channel(ps, c1, c2, 64), SymbolBlock(y));
            IciPowers b;
            comm_ici_powers(ps, c1, c2, y, b);
            for (std::size_t p = 0; p < 64; ++p) {
                const double scale = a.signal[p] + a.interference[p];
                worst = std::max(worst, std::abs(a.signal[p] - b.signal[p]) / scale);
                worst = std::max(worst, std::abs(a.interference[p] - b.interference[p]) / scale);
            }
        }
        CHECK(worst < 1e-10);
        // aligned case: 2 N c1 l integer for every path
        const IciPowers a = ici_decompose(effective_comm_channel(ps, 0.0, 0.25, 64), SymbolBlock(y));
        IciPowers b;
        comm_ici_powers(ps, 0.0, 0.25, y, b);
        for (std::size_t p = 0; p < 64; ++p) CHECK(std::abs(a.interference[p] - b.interference[p]) < 1e-10);
    }
}

TEST_CASE("path set validation") {
    PathSet ps;
    CHECK_THROWS_AS(ps.validate(), InvalidArgument);
    ps.paths.push_back({1.0, 1.5, 0.0});
    CHECK_THROWS_AS(ps.validate(), InvalidArgument);
    ps.paths[0].delay = 12.0;
    CHECK_THROWS_AS(ps.validate(10), InvalidArgument);
    ps.paths[0].delay = 2.0;
    CHECK_NOTHROW(ps.validate(10));
}

TEST_CASE("noisy channel application") {
    PathSet ps;
    ps.paths.push_back({1.0, 0.0, 0.0});
    const CVec x = oracle::random_block(16, 11);
    Stream rng(12, StreamTag::Noise);
    const CVec y = apply_channel(effective_comm_channel(ps, 0.1, 0.2, 16), SymbolBlock(x), 0.0, rng);
    for (std::size_t i = 0; i < 16; ++i) CHECK(std::abs(y[i] - x[i]) < 1e-12);
}
