#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "agile_afdm/baselines.hpp"
#include "agile_afdm/daft.hpp"
#include "oracles.hpp"

using namespace agile_afdm;

namespace {

SymbolBlock impulse(std::size_t n) {
    CVec e(n, 0.0);
    e[0] = 1.0;
    return SymbolBlock(e);
}

}  // namespace

TEST_CASE("ofdm is the c2 = 0 special case") {
    const SymbolBlock x(oracle::random_block(16, 1));
    CHECK(ofdm_papr(x, 8) == papr_db(x, 0.0, 8));
    CHECK(std::abs(ofdm_papr(impulse(16), 8)) < 1e-12);
}

TEST_CASE("clipping") {
    SUBCASE("constant envelope is untouched") {
        CVec s(8);
        for (std::size_t i = 0; i < 8; ++i) s[i] = oracle::phasor(0.1 * double(i));
        const TimeSignal c = clip(TimeSignal(s), 1.5);
        for (std::size_t i = 0; i < 8; ++i) CHECK(c[i] == s[i]);
    }
    SUBCASE("huge ratio is the identity") {
        const CVec s = oracle::random_block(16, 2);
        CHECK(clip(TimeSignal(s), 1e9).values() == s);
    }
    SUBCASE("one large sample is limited with its phase kept") {
        // {9, 1 x 9}: rms = sqrt(90 / 10) = 3, so the first sample sits at 3 rms
        CVec s(10, 1.0);
        s[0] = 9.0 * oracle::phasor(0.3);
        const double rms = std::sqrt(TimeSignal(s).energy() / 10.0);
        REQUIRE(std::abs(s[0]) == doctest::Approx(3.0 * rms));
        const TimeSignal c = clip(TimeSignal(s), 2.0);
        CHECK(std::abs(c[0]) == doctest::Approx(2.0 * rms));
        CHECK(std::arg(c[0]) == doctest::Approx(std::arg(s[0])));
        for (std::size_t i = 1; i < 10; ++i) CHECK(c[i] == s[i]);
    }
    SUBCASE("clipping lowers the papr of a peaky block") {
        const SymbolBlock x(oracle::random_block(16, 3));
        const auto r = clipping_papr(x, 2.0, 8);
        CHECK(r.papr_evaluations == 1);
        const TimeSignal env = oversampled_envelope(x, 0.0, 8);
        CHECK(r.papr_db == doctest::Approx(papr_db_of_samples(clip(env, 2.0).span())));
        CHECK(r.papr_db <= ofdm_papr(x, 8));
    }
}

TEST_CASE("selective mapping") {
    BaselineConfig cfg;
    const SymbolBlock x(oracle::random_block(16, 4));
    SUBCASE("U = 1 is plain OFDM") {
        cfg.slm_candidates = 1;
        const auto r = slm(x, cfg, 8, 7);
        CHECK(r.papr_db == ofdm_papr(x, 8));
        CHECK(r.papr_evaluations == 1);
    }
    SUBCASE("impulse") {
        CHECK(std::abs(slm(impulse(16), cfg, 8, 7).papr_db) < 1e-12);
    }
    SUBCASE("prefix minimum") {
        cfg.eval_budget = 128;
        cfg.slm_candidates = 128;
        const auto all = slm(x, cfg, 8, 7);
        cfg.slm_candidates = 64;
        const auto half = slm(x, cfg, 8, 7);
        CHECK(all.papr_db <= half.papr_db);
        CHECK(all.papr_evaluations == 128);
    }
    SUBCASE("selected mask is recoverable") {
        const auto r = slm(x, cfg, 8, 7);
        const CVec mask = slm_mask(16, r.selected, 7);
        for (std::size_t i = 0; i < 16; ++i) CHECK(std::abs(r.symbols[i] - x[i] * mask[i]) < 1e-15);
        CHECK(r.papr_db == doctest::Approx(papr_db(SymbolBlock(r.symbols), 0.0, 8)));
    }
    SUBCASE("budget is enforced") {
        cfg.slm_candidates = 32;
        cfg.eval_budget = 16;
        CHECK_THROWS_AS(slm(x, cfg, 8, 7), InvalidArgument);
    }
}

TEST_CASE("partial transmit sequences") {
    BaselineConfig cfg;
    SUBCASE("V = 1 is plain OFDM") {
        const SymbolBlock x(oracle::random_block(16, 5));
        cfg.pts_subblocks = 1;
        CHECK(pts(x, cfg, 8, 1).papr_db == ofdm_papr(x, 8));
    }
    SUBCASE("impulse") {
        CHECK(std::abs(pts(impulse(16), cfg, 8, 1).papr_db) < 1e-12);
    }
    SUBCASE("exhaustive N = 8, V = 2") {
        const CVec xv = oracle::random_block(8, 6);
        cfg.pts_subblocks = 2;
        const auto r = pts(SymbolBlock(xv), cfg, 8, 1);
        double best = 1e9;
        for (double sign : {1.0, -1.0}) {
            CVec c = xv;
            for (std::size_t i = 4; i < 8; ++i) c[i] *= sign;
            best = std::min(best, papr_db(SymbolBlock(c), 0.0, 8));
        }
        CHECK(r.papr_db == doctest::Approx(best).epsilon(1e-14));
        CHECK(r.papr_evaluations == 2);
    }
    SUBCASE("sampled search stays in budget") {
        cfg.pts_alphabet = {1.0, -1.0, cplx(0, 1), cplx(0, -1)};
        cfg.pts_subblocks = 8;
        cfg.eval_budget = 16;
        const auto r = pts(SymbolBlock(oracle::random_block(16, 7)), cfg, 8, 3);
        CHECK(r.papr_evaluations == 16);
    }
    SUBCASE("sub-blocks must divide N") {
        cfg.pts_subblocks = 3;
        CHECK_THROWS_AS(pts(SymbolBlock(oracle::random_block(16, 8)), cfg, 8, 1), InvalidArgument);
    }
}

TEST_CASE("config validation") {
    BaselineConfig cfg;
    cfg.clipping_ratio = 0.5;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.pts_alphabet = {cplx(2.0, 0.0)};
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}
