#include "agile_afdm/harness/experiment.hpp"

#include "agile_afdm/baselines.hpp"
#include "agile_afdm/harness/parallel.hpp"
#include "agile_afdm/harness/stats.hpp"
#include "agile_afdm/rng.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

namespace agile_afdm::harness {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<std::string> kColumns = {"block", "channel", "user", "delay",  "doppler",    "scheme",
                                           "metric", "unit",  "value", "c1",    "c2", "evaluations"};

struct Row {
    std::string block, channel, user, delay, doppler;
    std::string scheme, metric, unit;
    double value = 0.0;
    double c1 = 0.0, c2 = 0.0;
    std::size_t evaluations = 0;
};

class CsvFile {
public:
    CsvFile(const std::filesystem::path& path, const json& header) : out_(path) {
        if (!out_) throw std::runtime_error("cannot write " + path.string());
        out_ << "# " << header.dump() << '\n';
    }
    void line(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }
    void row(const Row& r) {
        line({r.block, r.channel, r.user, r.delay, r.doppler, r.scheme, r.metric, r.unit, fmt(r.value),
              fmt(r.c1), fmt(r.c2), std::to_string(r.evaluations)});
    }

private:
    std::ofstream out_;
};

json file_header(const ExperimentConfig& cfg, const std::string& table) {
    // the output location does not affect results, keep it out of the header
    json c = to_json(cfg);
    c.erase("output");
    return {{"version", AGILE_AFDM_VERSION}, {"table", table}, {"config", c}};
}

std::filesystem::path prepare(const ExperimentConfig& cfg) {
    std::filesystem::path dir(cfg.output);
    std::filesystem::create_directories(dir);
    return dir;
}

void write_summary(const std::filesystem::path& dir, const json& s) {
    std::ofstream out(dir / "summary.json");
    if (!out) throw std::runtime_error("cannot write summary.json");
    out << s.dump(2) << '\n';
}

// stderr progress, roughly every 10% of the items
class Progress {
public:
    Progress(std::string label, std::size_t total, bool on)
        : label_(std::move(label)), total_(total), on_(on), t0_(std::chrono::steady_clock::now()) {}
    void done(std::size_t k) {
        if (!on_ || total_ == 0) return;
        const std::size_t pct = (k * 10) / total_;
        if (pct > last_ || k == total_) {
            last_ = pct;
            std::cerr << label_ << ": " << k << "/" << total_ << "  " << elapsed() << " s\n";
        }
    }
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::string label_;
    std::size_t total_;
    bool on_;
    std::size_t last_ = 0;
    std::chrono::steady_clock::time_point t0_;
};

json dist_summary(const RVec& db) {
    RVec lin;
    for (double v : db) lin.push_back(std::pow(10.0, v / 10.0));
    return {{"mean_db", mean(db)},
            {"std_db", stddev(db)},
            {"median_db", quantile(db, 0.5)},
            {"q1_db", quantile(db, 0.25)},
            {"q3_db", quantile(db, 0.75)},
            {"db_of_mean_linear", 10.0 * std::log10(mean(lin))}};
}

json mean_std(const RVec& v) {
    if (v.empty()) return {{"mean", nullptr}, {"std", nullptr}, {"count", 0}};
    return {{"mean", mean(v)}, {"std", stddev(v)}, {"count", v.size()}};
}

CVec pts_alphabet(const std::string& name) {
    if (name == "qpsk") return {cplx{1, 0}, cplx{-1, 0}, cplx{0, 1}, cplx{0, -1}};
    return {cplx{1, 0}, cplx{-1, 0}};
}

// ---------------------------------------------------------------- PAPR

const std::array<const char*, 6> kPaprSchemes = {"ofdm", "static_afdm", "clipping", "slm", "pts", "agile"};

struct PaprRecord {
    double papr = 0.0;
    double c2 = 0.0;
    std::size_t evaluations = 0;
};

// ---------------------------------------------------------------- CRLB

double safe(double v) { return std::isfinite(v) ? v : kInf; }

Crlb crlb_or_inf(double delay, double doppler, double c1, double c2, const SymbolBlock& x, double snr) {
    try {
        return crlb(fim_summary(delay, doppler, c1, c2, x, snr));
    } catch (const Unidentifiable&) {
        return {kInf, kInf};
    }
}

// Ensemble-mean CRLB over a G x G grid; argmin per metric, first index wins ties.
struct GridMin {
    ChirpParams delay_c, doppler_c;
    double delay_mean = kInf, doppler_mean = kInf;
};

double improvement(double ref, double v) { return (ref - v) / ref * 100.0; }

}  // namespace

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
    return buf;
}

CVec draw_symbols(const Modulation& m, std::size_t n, double variance, std::uint64_t seed,
                  std::uint64_t a, std::uint64_t b) {
    Stream rng(seed, StreamTag::Data, a, b);
    CVec x(n);
    if (m.kind == "qam") {
        const int side = static_cast<int>(std::lround(std::sqrt(double(m.qam_order))));
        const double scale = std::sqrt(variance / (2.0 * (double(m.qam_order) - 1.0) / 3.0));
        for (auto& v : x) {
            const auto k = static_cast<int>(rng.below(std::uint64_t(m.qam_order)));
            v = scale * cplx(2.0 * (k % side) - (side - 1), 2.0 * (k / side) - (side - 1));
        }
    } else {
        for (auto& v : x) v = rng.complex_normal(variance);
    }
    return x;
}

PathSet draw_channel(const ChannelSection& c, std::uint64_t seed, std::uint64_t realization) {
    Stream rng(seed, StreamTag::Channel, realization);
    PathSet ps;
    for (std::size_t i = 0; i < c.delays.size(); ++i) {
        const double var = c.tap_law == "amplitude" ? c.tap_values[i] * c.tap_values[i] : c.tap_values[i];
        ps.paths.push_back({rng.complex_normal(var), c.delays[i], c.dopplers[i]});
    }
    ps.validate(c.prefix);
    return ps;
}

json run_papr_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
    const auto& p = cfg.papr;
    const std::size_t users = p.users;
    const std::size_t nu = p.subcarriers / users;
    // each user occupies nu of the N subcarriers; its envelope is sampled on the N L grid
    const std::size_t oversample = p.oversample * users;
    const std::size_t budget = p.eval_budget / users;
    const PaprSearchConfig search{p.coarse_step, p.fine_step, budget};
    BaselineConfig bc;
    bc.clipping_ratio = p.clipping_ratio;
    bc.slm_candidates = p.slm_candidates;
    bc.pts_subblocks = p.pts_subblocks;
    bc.pts_alphabet = pts_alphabet(p.pts_alphabet);
    bc.eval_budget = budget;
    bc.validate();
    search.validate();

    const std::size_t items = p.blocks * users;
    std::vector<std::array<PaprRecord, 6>> rec(items);
    Progress prog("papr", items, opt.progress);
    std::size_t finished = 0;
    const std::size_t chunk = std::max<std::size_t>(1, items / 10);
    for (std::size_t start = 0; start < items; start += chunk) {
        const std::size_t len = std::min(chunk, items - start);
        parallel_for(len, opt.workers, [&](std::size_t k) {
            const std::size_t i = start + k;
            const SymbolBlock x(draw_symbols(cfg.modulation, nu, 1.0, cfg.seed, i / users, i % users));
            auto& r = rec[i];
            r[0] = {ofdm_papr(x, oversample), 0.0, 1};
            r[1] = {papr_db(x, p.static_c2, oversample), wrap_unit(p.static_c2), 1};
            const auto cl = clipping_papr(x, p.clipping_ratio, oversample);
            r[2] = {cl.papr_db, 0.0, cl.papr_evaluations};
            const auto sl = slm(x, bc, oversample, cfg.seed);
            r[3] = {sl.papr_db, 0.0, sl.papr_evaluations};
            const auto pt = pts(x, bc, oversample, cfg.seed);
            r[4] = {pt.papr_db, 0.0, pt.papr_evaluations};
            const auto ag = optimize_papr_c2(x, search, oversample);
            r[5] = {ag.papr_db, ag.c2, ag.papr_evaluations};
        });
        finished += len;
        prog.done(finished);
    }

    const auto dir = prepare(cfg);
    {
        CsvFile csv(dir / "papr.csv", file_header(cfg, "papr"));
        csv.line(kColumns);
        for (std::size_t i = 0; i < items; ++i) {
            for (std::size_t s = 0; s < kPaprSchemes.size(); ++s) {
                Row row;
                row.block = std::to_string(i / users);
                row.user = std::to_string(i % users);
                row.scheme = kPaprSchemes[s];
                row.metric = "papr";
                row.unit = "dB";
                row.value = rec[i][s].papr;
                row.c2 = rec[i][s].c2;
                row.evaluations = rec[i][s].evaluations;
                csv.row(row);
            }
        }
    }

    std::array<RVec, 6> values;
    std::array<std::size_t, 6> max_evals{};
    double lo = kInf, hi = -kInf;
    for (const auto& r : rec) {
        for (std::size_t s = 0; s < 6; ++s) {
            values[s].push_back(r[s].papr);
            max_evals[s] = std::max(max_evals[s], r[s].evaluations);
            lo = std::min(lo, r[s].papr);
            hi = std::max(hi, r[s].papr);
        }
    }
    lo = std::floor(lo);
    const auto count = static_cast<std::size_t>(std::ceil((std::ceil(hi) - lo) / p.ccdf_step_db)) + 2;
    std::array<Ccdf, 6> cc;
    for (std::size_t s = 0; s < 6; ++s) cc[s] = ccdf_on_grid(values[s], lo, p.ccdf_step_db, count);
    {
        CsvFile csv(dir / "papr_ccdf.csv", file_header(cfg, "papr_ccdf"));
        std::vector<std::string> head{"threshold_db"};
        for (const char* s : kPaprSchemes) head.emplace_back(s);
        csv.line(head);
        for (std::size_t k = 0; k < count; ++k) {
            std::vector<std::string> cells{fmt(cc[0].threshold[k])};
            for (std::size_t s = 0; s < 6; ++s) cells.push_back(fmt(cc[s].probability[k]));
            csv.line(cells);
        }
    }

    json schemes = json::object();
    std::array<double, 6> point{};
    for (std::size_t s = 0; s < 6; ++s) {
        point[s] = ccdf_point(cc[s], 1e-3);
        schemes[kPaprSchemes[s]] = {{"ccdf_1e-3_db", point[s]},
                                    {"mean_db", mean(values[s])},
                                    {"max_evaluations_per_user", max_evals[s]}};
    }
    const auto ks = ks_two_sample(values[1], values[0]);
    json summary = {{"experiment", "papr"},
                    {"version", AGILE_AFDM_VERSION},
                    {"blocks", p.blocks},
                    {"users", users},
                    {"subcarriers_per_user", nu},
                    {"evaluation_budget_per_user", budget},
                    {"schemes", schemes},
                    {"gap_vs_agile_db",
                     {{"slm", point[3] - point[5]}, {"pts", point[4] - point[5]}, {"clipping", point[2] - point[5]}}},
                    {"ks_static_vs_ofdm", {{"statistic", ks.statistic}, {"p_value", ks.p_value}}}};
    write_summary(dir, summary);
    if (opt.progress) std::cerr << "papr: done in " << prog.elapsed() << " s\n";
    return summary;
}

json run_sir_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
    const auto& s = cfg.sir;
    const std::size_t pairs = s.blocks * s.realizations;
    std::vector<PathSet> channels;
    for (std::size_t r = 0; r < s.realizations; ++r) channels.push_back(draw_channel(s.channel, cfg.seed, r));
    std::vector<SymbolBlock> data;
    for (std::size_t b = 0; b < s.blocks; ++b) {
        data.emplace_back(draw_symbols(cfg.modulation, s.subcarriers, 1.0, cfg.seed, b));
    }
    auto objective = [&](std::size_t i) {
        SirObjective o;
        o.paths = channels[i % s.realizations];
        o.x = data[i / s.realizations];
        o.delta = s.delta;
        return o;
    };

    // static baseline: ensemble-mean zeta on the grid, summed serially in pair order
    const std::size_t g = s.grid;
    RVec sum(g * g, 0.0);
    RVec grid_max(pairs, 0.0);
    Progress gprog("sir static grid", pairs, opt.progress);
    const std::size_t batch = 32;
    std::vector<RVec> buf(batch);
    for (std::size_t start = 0; start < pairs; start += batch) {
        const std::size_t len = std::min(batch, pairs - start);
        parallel_for(len, opt.workers, [&](std::size_t k) { buf[k] = sir_grid(objective(start + k), g, g); });
        for (std::size_t k = 0; k < len; ++k) {
            for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += buf[k][j];
            grid_max[start + k] = *std::max_element(buf[k].begin(), buf[k].end());
        }
        gprog.done(start + len);
    }
    std::size_t best = 0;
    for (std::size_t j = 1; j < sum.size(); ++j) {
        if (sum[j] > sum[best]) best = j;
    }
    const ChirpParams static_c(double(best / g) / double(g), double(best % g) / double(g));
    const double static_mean = sum[best] / double(pairs);

    std::vector<SirValue> ofdm(pairs), stat(pairs);
    std::vector<SirOptResult> agile(pairs);
    Progress prog("sir agile", pairs, opt.progress);
    std::size_t finished = 0;
    const std::size_t chunk = std::max<std::size_t>(1, pairs / 10);
    for (std::size_t start = 0; start < pairs; start += chunk) {
        const std::size_t len = std::min(chunk, pairs - start);
        parallel_for(len, opt.workers, [&](std::size_t k) {
            const std::size_t i = start + k;
            const SirObjective o = objective(i);
            ofdm[i] = sir(0.0, 0.0, o);
            stat[i] = sir(static_c, o);
            agile[i] = optimize_sir(o, s.optimizer);
            agile[i].blocks.clear();
        });
        finished += len;
        prog.done(finished);
    }

    const auto dir = prepare(cfg);
    RVec db_ofdm, db_static, db_agile, jensen;
    std::size_t skipped = 0;
    {
        CsvFile csv(dir / "sir.csv", file_header(cfg, "sir"));
        csv.line(kColumns);
        for (std::size_t i = 0; i < pairs; ++i) {
            const std::array<std::pair<const char*, SirValue>, 3> vals = {
                {{"ofdm", ofdm[i]}, {"static_afdm", stat[i]}, {"agile", agile[i].value}}};
            const std::array<ChirpParams, 3> cs = {ChirpParams(), static_c, agile[i].c};
            const std::array<std::size_t, 3> ev = {1, 1, agile[i].evaluations};
            for (std::size_t k = 0; k < 3; ++k) {
                Row row;
                row.block = std::to_string(i / s.realizations);
                row.channel = std::to_string(i % s.realizations);
                row.scheme = vals[k].first;
                row.metric = "sir";
                row.c1 = cs[k].c1;
                row.c2 = cs[k].c2;
                row.evaluations = ev[k];
                row.unit = "dB";
                row.value = vals[k].second.db;
                csv.row(row);
                row.unit = "linear";
                row.value = vals[k].second.linear;
                csv.row(row);
            }
            db_ofdm.push_back(ofdm[i].db);
            db_static.push_back(stat[i].db);
            db_agile.push_back(agile[i].value.db);
            jensen.push_back(std::max(agile[i].value.linear, grid_max[i]));
            skipped += agile[i].skipped_blocks;
        }
    }
    {
        CsvFile csv(dir / "sir_cdf.csv", file_header(cfg, "sir_cdf"));
        csv.line({"scheme", "sir_db", "cdf"});
        const std::array<std::pair<const char*, const RVec*>, 3> all = {
            {{"ofdm", &db_ofdm}, {"static_afdm", &db_static}, {"agile", &db_agile}}};
        for (const auto& [name, v] : all) {
            RVec sorted = *v;
            std::sort(sorted.begin(), sorted.end());
            for (std::size_t k = 0; k < sorted.size(); ++k) {
                csv.line({name, fmt(sorted[k]), fmt(double(k + 1) / double(sorted.size()))});
            }
        }
    }

    json st = dist_summary(db_static);
    st["c1"] = static_c.c1;
    st["c2"] = static_c.c2;
    st["ensemble_mean_db"] = sir_to_db(static_mean);
    json ag = dist_summary(db_agile);
    ag["skipped_blocks"] = skipped;
    const double lhs = mean(jensen);
    const double se = std_error(jensen);
    json summary = {{"experiment", "sir"},
                    {"version", AGILE_AFDM_VERSION},
                    {"blocks", s.blocks},
                    {"realizations", s.realizations},
                    {"schemes", {{"ofdm", dist_summary(db_ofdm)}, {"static_afdm", st}, {"agile", ag}}},
                    {"jensen",
                     {{"mean_of_max_linear", lhs},
                      {"max_of_mean_linear", static_mean},
                      {"std_error", se},
                      {"holds", lhs >= static_mean - 2.0 * se}}}};
    write_summary(dir, summary);
    if (opt.progress) std::cerr << "sir: done in " << prog.elapsed() + gprog.elapsed() << " s\n";
    return summary;
}

json run_crlb_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
    const auto& s = cfg.crlb;
    const double snr = std::pow(10.0, s.snr_db / 10.0);
    const std::size_t n = s.subcarriers, nr = s.realizations, g = s.grid;
    const std::size_t points = s.delays.size() * s.dopplers.size();

    struct PointResult {
        GridMin grid;
        std::vector<Crlb> ofdm, stat;
        std::vector<PsoResult> pso_delay, pso_doppler;
    };
    std::vector<PointResult> res(points);
    Progress prog("crlb", points, opt.progress);

    for (std::size_t pt = 0; pt < points; ++pt) {
        const double delay = s.delays[pt / s.dopplers.size()];
        const double doppler = s.dopplers[pt % s.dopplers.size()];
        std::vector<SymbolBlock> xs;
        for (std::size_t r = 0; r < nr; ++r) {
            xs.emplace_back(draw_symbols(cfg.modulation, n, 1.0 / double(n), cfg.seed, pt, r));
        }
        std::vector<RVec> gd(nr), gn(nr);
        parallel_for(nr, opt.workers, [&](std::size_t r) {
            gd[r].resize(g * g);
            gn[r].resize(g * g);
            for (std::size_t i = 0; i < g; ++i) {
                for (std::size_t j = 0; j < g; ++j) {
                    const Crlb c = crlb_or_inf(delay, doppler, double(i) / double(g), double(j) / double(g), xs[r], snr);
                    gd[r][i * g + j] = c.delay;
                    gn[r][i * g + j] = c.doppler;
                }
            }
        });
        auto& out = res[pt];
        std::size_t bd = 0, bn = 0;
        RVec md(g * g, 0.0), mn(g * g, 0.0);
        for (std::size_t k = 0; k < g * g; ++k) {
            for (std::size_t r = 0; r < nr; ++r) {
                md[k] += gd[r][k];
                mn[k] += gn[r][k];
            }
            if (md[k] < md[bd]) bd = k;
            if (mn[k] < mn[bn]) bn = k;
        }
        auto at = [&](std::size_t k) { return ChirpParams(double(k / g) / double(g), double(k % g) / double(g)); };
        out.grid = {at(bd), at(bn), md[bd] / double(nr), mn[bn] / double(nr)};

        out.ofdm.resize(nr);
        out.stat.resize(nr);
        out.pso_delay.resize(nr);
        out.pso_doppler.resize(nr);
        parallel_for(nr, opt.workers, [&](std::size_t r) {
            const SymbolBlock& x = xs[r];
            out.ofdm[r] = crlb_or_inf(delay, doppler, 0.0, 0.0, x, snr);
            out.stat[r] = {crlb_or_inf(delay, doppler, out.grid.delay_c.c1, out.grid.delay_c.c2, x, snr).delay,
                           crlb_or_inf(delay, doppler, out.grid.doppler_c.c1, out.grid.doppler_c.c2, x, snr).doppler};
            // plain swarm, then the two fixed references compete with its result;
            // seeding the swarm with them collapses it onto the corner point
            auto agile = [&](int metric, const ChirpParams& fixed, double ofdm_v, double fixed_v) {
                PsoResult p = pso_minimize(
                    [&](double a, double b) {
                        const Crlb c = crlb_or_inf(delay, doppler, a, b, x, snr);
                        return safe(metric == 0 ? c.delay : c.doppler);
                    },
                    s.pso, Stream(cfg.seed, StreamTag::Particle, pt, r, std::uint64_t(metric)).next_u64());
                p.evaluations += 2;
                if (fixed_v < p.value || (fixed_v == p.value && lex_less(fixed, p.c))) {
                    p.value = fixed_v;
                    p.c = fixed;
                }
                if (ofdm_v <= p.value) {
                    p.value = ofdm_v;
                    p.c = ChirpParams();
                }
                return p;
            };
            out.pso_delay[r] = agile(0, out.grid.delay_c, out.ofdm[r].delay, out.stat[r].delay);
            out.pso_doppler[r] = agile(1, out.grid.doppler_c, out.ofdm[r].doppler, out.stat[r].doppler);
            out.pso_delay[r].best_trace.clear();
            out.pso_doppler[r].best_trace.clear();
        });
        prog.done(pt + 1);
    }

    const auto dir = prepare(cfg);
    // improvement tables: [metric][reference] per point
    RVec imp[2][2];
    double min_imp = kInf;
    std::size_t excluded = 0, jensen_ok = 0;
    {
        CsvFile csv(dir / "crlb.csv", file_header(cfg, "crlb"));
        csv.line(kColumns);
        CsvFile icsv(dir / "crlb_improvement.csv", file_header(cfg, "crlb_improvement"));
        icsv.line({"delay", "doppler", "metric", "reference", "improvement_pct", "min_improvement_pct", "excluded"});
        for (std::size_t pt = 0; pt < points; ++pt) {
            const auto& o = res[pt];
            const double delay = s.delays[pt / s.dopplers.size()];
            const double doppler = s.dopplers[pt % s.dopplers.size()];
            for (std::size_t r = 0; r < nr; ++r) {
                Row row;
                row.block = std::to_string(pt);
                row.channel = std::to_string(r);
                row.delay = fmt(delay);
                row.doppler = fmt(doppler);
                row.unit = "samples^2";
                auto emit = [&](const char* scheme, const char* metric, double v, const ChirpParams& c, std::size_t ev) {
                    row.scheme = scheme;
                    row.metric = metric;
                    row.value = v;
                    row.c1 = c.c1;
                    row.c2 = c.c2;
                    row.evaluations = ev;
                    csv.row(row);
                };
                emit("ofdm", "crlb_delay", o.ofdm[r].delay, ChirpParams(), 1);
                emit("static_afdm", "crlb_delay", o.stat[r].delay, o.grid.delay_c, 1);
                emit("agile", "crlb_delay", o.pso_delay[r].value, o.pso_delay[r].c, o.pso_delay[r].evaluations);
                row.unit = "normalised^2";
                emit("ofdm", "crlb_doppler", o.ofdm[r].doppler, ChirpParams(), 1);
                emit("static_afdm", "crlb_doppler", o.stat[r].doppler, o.grid.doppler_c, 1);
                emit("agile", "crlb_doppler", o.pso_doppler[r].value, o.pso_doppler[r].c,
                     o.pso_doppler[r].evaluations);
            }
            for (int m = 0; m < 2; ++m) {
                RVec agile_vals;
                for (std::size_t r = 0; r < nr; ++r) {
                    agile_vals.push_back(m == 0 ? o.pso_delay[r].value : o.pso_doppler[r].value);
                }
                const double static_mean = m == 0 ? o.grid.delay_mean : o.grid.doppler_mean;
                if (std::isfinite(mean(agile_vals)) && mean(agile_vals) <= static_mean) ++jensen_ok;
                for (int ref = 0; ref < 2; ++ref) {
                    RVec per;
                    std::size_t bad = 0;
                    for (std::size_t r = 0; r < nr; ++r) {
                        const Crlb& base = ref == 0 ? o.ofdm[r] : o.stat[r];
                        const double b = m == 0 ? base.delay : base.doppler;
                        const double a = agile_vals[r];
                        if (!std::isfinite(a) || !std::isfinite(b)) {
                            ++bad;
                            continue;
                        }
                        per.push_back(improvement(b, a));
                    }
                    excluded += bad;
                    const double pm = per.empty() ? std::nan("") : mean(per);
                    const double mi = per.empty() ? std::nan("") : *std::min_element(per.begin(), per.end());
                    if (!per.empty()) {
                        imp[m][ref].push_back(pm);
                        min_imp = std::min(min_imp, mi);
                    }
                    icsv.line({fmt(delay), fmt(doppler), m == 0 ? "delay" : "doppler", ref == 0 ? "ofdm" : "static_afdm",
                               fmt(pm), fmt(mi), std::to_string(bad)});
                }
            }
        }
    }
    auto avg = [](const RVec& v) { return v.empty() ? json(nullptr) : json(mean(v)); };
    json summary = {{"experiment", "crlb"},
                    {"version", AGILE_AFDM_VERSION},
                    {"points", points},
                    {"realizations", nr},
                    {"mean_improvement_pct",
                     {{"delay_vs_ofdm", avg(imp[0][0])},
                      {"delay_vs_static", avg(imp[0][1])},
                      {"doppler_vs_ofdm", avg(imp[1][0])},
                      {"doppler_vs_static", avg(imp[1][1])}}},
                    {"min_improvement_pct", std::isfinite(min_imp) ? json(min_imp) : json(nullptr)},
                    {"unidentifiable_excluded", excluded},
                    {"jensen_min_form_holds", jensen_ok == 2 * points}};
    write_summary(dir, summary);
    if (opt.progress) std::cerr << "crlb: done in " << prog.elapsed() << " s\n";
    return summary;
}

json run_sensitivity_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
    const auto& s = cfg.sensitivity;
    const double snr = std::pow(10.0, s.snr_db / 10.0);
    const std::size_t g = s.grid;
    // [clipped, unclipped] x [rv_l, cv_l, rv_nu, cv_nu]
    struct Trial {
        std::array<std::array<double, 4>, 2> v{};
        std::array<std::size_t, 2> excluded{};
    };
    std::vector<Trial> trials(s.trials);
    Progress prog("sensitivity", s.trials, opt.progress);
    std::size_t finished = 0;
    const std::size_t chunk = std::max<std::size_t>(1, s.trials / 10);
    for (std::size_t start = 0; start < s.trials; start += chunk) {
        const std::size_t len = std::min(chunk, s.trials - start);
        parallel_for(len, opt.workers, [&](std::size_t k) {
            const std::size_t t = start + k;
            const SymbolBlock x(draw_symbols(cfg.modulation, s.subcarriers, 1.0 / double(s.subcarriers), cfg.seed, t));
            RVec lc, nc, lu, nu;
            Trial& tr = trials[t];
            for (std::size_t i = 0; i < g; ++i) {
                for (std::size_t j = 0; j < g; ++j) {
                    const FimSummary f = fim_summary(s.delay, s.doppler, double(i) / double(g), double(j) / double(g), x, snr);
                    try {
                        const Crlb c = crlb(f);
                        lc.push_back(c.delay);
                        nc.push_back(c.doppler);
                    } catch (const Unidentifiable&) {
                        ++tr.excluded[0];
                    }
                    try {
                        const Crlb c = crlb_unchecked(f);
                        lu.push_back(c.delay);
                        nu.push_back(c.doppler);
                    } catch (const Unidentifiable&) {
                        ++tr.excluded[1];
                    }
                }
            }
            const auto a = sensitivity_rv_cv(lc), b = sensitivity_rv_cv(nc);
            const auto c = sensitivity_rv_cv(lu), d = sensitivity_rv_cv(nu);
            tr.v[0] = {a.rv, a.cv, b.rv, b.cv};
            tr.v[1] = {c.rv, c.cv, d.rv, d.cv};
        });
        finished += len;
        prog.done(finished);
    }

    const auto dir = prepare(cfg);
    const std::array<const char*, 4> names = {"rv_crlb_delay", "cv_crlb_delay", "rv_crlb_doppler", "cv_crlb_doppler"};
    const std::array<const char*, 2> variants = {"clipped", "unclipped"};
    std::array<std::array<RVec, 4>, 2> cols;
    std::array<std::size_t, 2> excluded{};
    {
        CsvFile csv(dir / "sensitivity.csv", file_header(cfg, "sensitivity"));
        csv.line(kColumns);
        for (std::size_t t = 0; t < s.trials; ++t) {
            for (std::size_t v = 0; v < 2; ++v) {
                excluded[v] += trials[t].excluded[v];
                for (std::size_t m = 0; m < 4; ++m) {
                    Row row;
                    row.block = std::to_string(t);
                    row.delay = fmt(s.delay);
                    row.doppler = fmt(s.doppler);
                    row.scheme = variants[v];
                    row.metric = names[m];
                    row.unit = "%";
                    row.value = trials[t].v[v][m];
                    row.evaluations = g * g;
                    csv.row(row);
                    cols[v][m].push_back(trials[t].v[v][m]);
                }
            }
        }
    }
    json summary = {{"experiment", "sensitivity"},
                    {"version", AGILE_AFDM_VERSION},
                    {"trials", s.trials},
                    {"delay", s.delay},
                    {"doppler", s.doppler}};
    for (std::size_t v = 0; v < 2; ++v) {
        json sec = json::object();
        for (std::size_t m = 0; m < 4; ++m) sec[names[m]] = mean_std(cols[v][m]);
        sec["excluded_points"] = excluded[v];
        summary[variants[v]] = sec;
    }
    write_summary(dir, summary);
    if (opt.progress) std::cerr << "sensitivity: done in " << prog.elapsed() << " s\n";
    return summary;
}

json run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
    switch (cfg.kind) {
    case ExperimentKind::Papr: return run_papr_experiment(cfg, opt);
    case ExperimentKind::Sir: return run_sir_experiment(cfg, opt);
    case ExperimentKind::Crlb: return run_crlb_experiment(cfg, opt);
    case ExperimentKind::Sensitivity: return run_sensitivity_experiment(cfg, opt);
    }
    throw ConfigError("unknown experiment kind");
}

}  // namespace agile_afdm::harness
