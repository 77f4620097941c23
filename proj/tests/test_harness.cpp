#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "agile_afdm/harness/config.hpp"
#include "agile_afdm/harness/experiment.hpp"
#include "agile_afdm/harness/parallel.hpp"
#include "agile_afdm/harness/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace agile_afdm;
using namespace agile_afdm::harness;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string error_of(const json& j) {
    try {
        parse_config(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::ifstream in(e.path(), std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        out[e.path().filename().string()] = ss.str();
    }
    return out;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("agile_afdm_test_" + name);
    fs::remove_all(p);
    return p;
}

// Two runs at different worker counts; returns the files of the first.
std::map<std::string, std::string> run_twice(ExperimentConfig cfg, const std::string& name) {
    RunOptions opt;
    opt.progress = false;
    cfg.output = scratch(name + "_a").string();
    opt.workers = 1;
    run_experiment(cfg, opt);
    const auto a = read_dir(cfg.output);
    cfg.output = scratch(name + "_b").string();
    opt.workers = 3;
    run_experiment(cfg, opt);
    const auto b = read_dir(cfg.output);
    CHECK(a == b);
    return a;
}

}  // namespace

TEST_CASE("config parsing") {
    SUBCASE("defaults round trip") {
        for (auto k : {ExperimentKind::Papr, ExperimentKind::Sir, ExperimentKind::Crlb,
                       ExperimentKind::Sensitivity}) {
            const json j = to_json(default_config(k));
            CHECK(to_json(parse_config(j)) == j);
            CHECK(parse_kind(to_string(k)) == k);
        }
    }
    SUBCASE("sparse config fills defaults") {
        const ExperimentConfig c = parse_config(json{{"experiment", "sir"}, {"sir", {{"blocks", 3}}}});
        CHECK(c.kind == ExperimentKind::Sir);
        CHECK(c.sir.blocks == 3);
        CHECK(c.sir.realizations == 100);
        CHECK(c.sir.channel.delays == std::vector<double>{1, 4, 5});
    }
    SUBCASE("unknown keys name their path") {
        CHECK(error_of(json{{"experiment", "papr"}, {"bogus", 1}}).find("'bogus'") != std::string::npos);
        CHECK(error_of(json{{"experiment", "papr"}, {"papr", {{"blokcs", 1}}}}).find("'papr.blokcs'") !=
              std::string::npos);
        CHECK(error_of(json{{"experiment", "sir"}, {"sir", {{"channel", {{"taps", {1}}}}}}})
                  .find("'sir.channel.taps'") != std::string::npos);
        CHECK(error_of(json{{"experiment", "crlb"}, {"crlb", {{"pso", {{"inertia", 1}}}}}})
                  .find("'crlb.pso.inertia'") != std::string::npos);
    }
    SUBCASE("type and range errors") {
        CHECK(error_of(json{{"papr", json::object()}}) != "");  // experiment missing
        CHECK(error_of(json{{"experiment", "bogus"}}) != "");
        CHECK(error_of(json{{"experiment", "papr"}, {"papr", {{"blocks", "many"}}}}) != "");
        CHECK(error_of(json{{"experiment", "papr"}, {"papr", {{"blocks", -4}}}}) != "");
        CHECK(error_of(json{{"experiment", "papr"}, {"papr", {{"users", 7}}}}) != "");
        CHECK(error_of(json{{"experiment", "papr"}, {"papr", {{"clipping_ratio", 0.5}}}}) != "");
        CHECK(error_of(json{{"experiment", "crlb"}, {"crlb", {{"pso", {{"wf", 0.999}}}}}}) != "");
        CHECK(error_of(json{{"experiment", "sir"}, {"modulation", {{"kind", "qam"}, {"qam_order", 8}}}}) != "");
        CHECK(error_of(json{{"experiment", "sir"}, {"sir", {{"channel", {{"delays", {1, 40}}}}}}}) != "");
    }
    SUBCASE("load from file") {
        const fs::path p = scratch("cfg.json");
        std::ofstream(p) << R"({"experiment": "sensitivity", "seed": 9, "sensitivity": {"trials": 2}})";
        const ExperimentConfig c = load_config(p.string());
        CHECK(c.seed == 9);
        CHECK(c.sensitivity.trials == 2);
        std::ofstream(p) << "{ not json";
        CHECK_THROWS_AS(load_config(p.string()), ConfigError);
        CHECK_THROWS_AS(load_config("/nonexistent/agile.json"), ConfigError);
    }
}

TEST_CASE("stats") {
    SUBCASE("moments") {
        const RVec v{1, 2, 3, 4};
        CHECK(mean(v) == 2.5);
        CHECK(stddev(v) == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
        CHECK(std_error(v) == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0).epsilon(1e-15));
    }
    SUBCASE("type-7 quantiles") {
        const RVec v{7, 1, 3, 5};
        CHECK(quantile(v, 0.0) == 1.0);
        CHECK(quantile(v, 1.0) == 7.0);
        CHECK(quantile(v, 0.5) == 4.0);
        CHECK(quantile(v, 0.25) == doctest::Approx(2.5));
        CHECK(quantile(v, 0.75) == doctest::Approx(5.5));
    }
    SUBCASE("ccdf") {
        RVec v;
        for (int i = 0; i < 1000; ++i) v.push_back(i / 100.0);
        const Ccdf c = ccdf_on_grid(v, 0.0, 0.5, 21);
        REQUIRE(c.threshold.size() == 21);
        for (std::size_t k = 0; k < c.threshold.size(); ++k) {
            const double t = c.threshold[k];
            const double want = double(std::count_if(v.begin(), v.end(), [&](double x) { return x > t; })) / 1000.0;
            CHECK(c.probability[k] == doctest::Approx(want).epsilon(1e-15));
            if (k) CHECK(c.probability[k] <= c.probability[k - 1]);
        }
        CHECK(ccdf_point(c, 0.1) == doctest::Approx(9.0));
        const Ccdf d = ccdf(v, 0.01);
        CHECK(d.probability.back() == 0.0);
    }
    SUBCASE("ks") {
        RVec a, b, c;
        Stream rng(3, StreamTag::Test);
        for (int i = 0; i < 2000; ++i) {
            a.push_back(rng.normal());
            b.push_back(rng.normal());
            c.push_back(rng.normal() + 0.5);
        }
        CHECK(ks_two_sample(a, a).statistic == 0.0);
        CHECK(ks_two_sample(a, a).p_value == doctest::Approx(1.0));
        CHECK(ks_two_sample(a, b).p_value > 0.01);
        CHECK(ks_two_sample(a, c).p_value < 1e-6);
        const KsResult tiny = ks_two_sample({1, 2, 3}, {4, 5, 6});
        CHECK(tiny.statistic == 1.0);
    }
}

TEST_CASE("parallel_for") {
    std::vector<std::size_t> out(1000);
    parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = i * i; });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == i * i);
    std::atomic<int> count{0};
    CHECK_THROWS_AS(parallel_for(100, 4,
                                 [&](std::size_t i) {
                                     ++count;
                                     if (i == 37) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
    parallel_for(0, 4, [&](std::size_t) { FAIL("called"); });
}

TEST_CASE("draws") {
    SUBCASE("symbol power") {
        for (const char* kind : {"gaussian", "qam"}) {
            Modulation m;
            m.kind = kind;
            double e = 0.0;
            const int blocks = 400;
            for (int b = 0; b < blocks; ++b) {
                for (const auto& v : draw_symbols(m, 64, 0.5, 1, b)) e += std::norm(v);
            }
            CHECK(e / (blocks * 64) == doctest::Approx(0.5).epsilon(0.02));
        }
        Modulation m;
        CHECK(draw_symbols(m, 8, 1.0, 5, 2) == draw_symbols(m, 8, 1.0, 5, 2));
        CHECK(draw_symbols(m, 8, 1.0, 5, 2) != draw_symbols(m, 8, 1.0, 5, 3));
    }
    SUBCASE("qam points") {
        Modulation m;
        m.kind = "qam";
        m.qam_order = 4;
        for (const auto& v : draw_symbols(m, 32, 2.0, 1, 0)) CHECK(std::abs(v) == doctest::Approx(std::sqrt(2.0)));
    }
    SUBCASE("channel taps") {
        ChannelSection c;
        const PathSet p = draw_channel(c, 1, 0);
        REQUIRE(p.paths.size() == 3);
        CHECK(p.paths[1].delay == 4.0);
        CHECK(p.paths[2].doppler == 0.7);
        double e0 = 0.0, e1 = 0.0;
        for (int r = 0; r < 2000; ++r) {
            const PathSet q = draw_channel(c, 1, r);
            e0 += std::norm(q.paths[0].gain);
            e1 += std::norm(q.paths[1].gain);
        }
        CHECK(e0 / 2000 == doctest::Approx(1.0).epsilon(0.1));
        CHECK(e1 / 2000 == doctest::Approx(0.2).epsilon(0.1));
    }
    SUBCASE("fmt") {
        CHECK(fmt(0.5) == "0.5");
        CHECK(fmt(1.0 / 3.0) == "0.333333333333");
    }
}

TEST_CASE("end to end, small scale") {
    SUBCASE("papr") {
        ExperimentConfig c = default_config(ExperimentKind::Papr);
        c.papr.blocks = 20;
        const auto files = run_twice(c, "papr");
        CHECK(files.count("papr.csv"));
        CHECK(files.count("papr_ccdf.csv"));
        const json s = json::parse(files.at("summary.json"));
        CHECK(s["schemes"]["agile"]["max_evaluations_per_user"].get<double>() <= 16);
        CHECK(s["schemes"]["agile"]["mean_db"].get<double>() <= s["schemes"]["ofdm"]["mean_db"].get<double>());
        const std::string& csv = files.at("papr.csv");
        CHECK(csv.rfind("# {", 0) == 0);
        CHECK(csv.find("\"output\"") == std::string::npos);
    }
    SUBCASE("sir") {
        ExperimentConfig c = default_config(ExperimentKind::Sir);
        c.sir.blocks = 2;
        c.sir.realizations = 2;
        c.sir.grid = 10;
        c.sir.optimizer.max_iters = 5;
        const auto files = run_twice(c, "sir");
        CHECK(files.count("sir.csv"));
        const json s = json::parse(files.at("summary.json"));
        CHECK(s["jensen"]["holds"].get<bool>());
    }
    SUBCASE("crlb") {
        ExperimentConfig c = default_config(ExperimentKind::Crlb);
        c.crlb.delays = {2};
        c.crlb.dopplers = {0.3, 0.7};
        c.crlb.realizations = 2;
        c.crlb.grid = 10;
        c.crlb.pso.particles = 20;
        c.crlb.pso.max_iters = 10;
        const auto files = run_twice(c, "crlb");
        const json s = json::parse(files.at("summary.json"));
        CHECK(s["min_improvement_pct"].get<double>() >= 0.0);
        CHECK(s["jensen_min_form_holds"].get<bool>());
    }
    SUBCASE("sensitivity") {
        ExperimentConfig c = default_config(ExperimentKind::Sensitivity);
        c.sensitivity.trials = 3;
        c.sensitivity.grid = 10;
        const auto files = run_twice(c, "sensitivity");
        CHECK(files.count("sensitivity.csv"));
    }
}
