#include "agile_afdm/sir.hpp"

#include <cmath>
#include <iostream>
#include <limits>

namespace agile_afdm {
namespace {

IciPowers powers(double c1, double c2, const SirObjective& obj) {
    IciPowers p;
    comm_ici_powers(obj.paths, c1, c2, obj.x.span(), p);
    return p;
}

// Shortest displacement on the unit torus.
double torus_step(double a, double b) {
    double d = std::abs(a - b);
    return std::min(d, 1.0 - d);
}

double torus_dist(const ChirpParams& a, const ChirpParams& b) {
    return std::hypot(torus_step(a.c1, b.c1), torus_step(a.c2, b.c2));
}

}  // namespace

void SirObjective::validate() const {
    paths.validate();
    if (x.size() == 0) throw InvalidArgument("SirObjective: empty symbol block");
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw InvalidArgument("SirObjective: delta must be finite and > 0");
    }
}

double sir_to_db(double linear) {
    if (!(linear > 0.0)) return -kSirCapDb;
    return std::min(10.0 * std::log10(linear), kSirCapDb);
}

SirValue sir(double c1, double c2, const SirObjective& obj) {
    const IciPowers p = powers(c1, c2, obj);
    double acc = 0.0;
    for (std::size_t i = 0; i < p.signal.size(); ++i) {
        acc += p.signal[i] / (p.interference[i] + obj.delta);
    }
    const double lin = acc / static_cast<double>(p.signal.size());
    return {lin, sir_to_db(lin)};
}

SirValue sir(const ChirpParams& c, const SirObjective& obj) { return sir(c.c1, c.c2, obj); }

RVec update_auxiliary(double c1, double c2, const SirObjective& obj) {
    const IciPowers p = powers(c1, c2, obj);
    RVec z(p.signal.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        z[i] = std::sqrt(p.signal[i]) / (p.interference[i] + obj.delta);
    }
    return z;
}

double fp_surrogate(double c1, double c2, const RVec& z, const SirObjective& obj) {
    const IciPowers p = powers(c1, c2, obj);
    if (z.size() != p.signal.size()) throw InvalidArgument("fp_surrogate: z has wrong length");
    double f = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        f += 2.0 * z[i] * std::sqrt(p.signal[i]) - z[i] * z[i] * (p.interference[i] + obj.delta);
    }
    return f;
}

std::array<double, 2> numerical_gradient(const SirObjective& obj, const RVec& z, double c1,
                                         double c2, double step) {
    const double g1 = (fp_surrogate(c1 + step, c2, z, obj) - fp_surrogate(c1 - step, c2, z, obj)) /
                      (2.0 * step);
    const double g2 = (fp_surrogate(c1, c2 + step, z, obj) - fp_surrogate(c1, c2 - step, z, obj)) /
                      (2.0 * step);
    return {g1, g2};
}

std::array<double, 2> AdamState::step(const std::array<double, 2>& grad) {
    ++t;
    std::array<double, 2> inc{};
    const double b1t = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double b2t = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    for (int i = 0; i < 2; ++i) {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        inc[i] = cfg.alpha * (m[i] / b1t) / (std::sqrt(v[i] / b2t) + cfg.eps);
    }
    return inc;
}

void SirOptConfig::validate() const {
    if (blocks_c1 == 0 || blocks_c2 == 0) throw InvalidArgument("sir: block grid must be >= 1x1");
    if (!(eps_con > 0.0)) throw InvalidArgument("sir: eps_con must be > 0");
    if (max_iters == 0) throw InvalidArgument("sir: max_iters must be >= 1");
    if (!(grad_step > 0.0)) throw InvalidArgument("sir: grad_step must be > 0");
    if (!(adam.alpha > 0.0)) throw InvalidArgument("sir: adam alpha must be > 0");
    if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
        throw InvalidArgument("sir: adam betas must lie in [0, 1)");
    }
    if (!(adam.eps > 0.0)) throw InvalidArgument("sir: adam eps must be > 0");
}

SirBlockRun run_sir_block(const SirObjective& obj, const ChirpParams& start,
                          const SirOptConfig& cfg) {
    SirBlockRun run;
    run.start = start;
    ChirpParams c = start;
    IciPowers pw;
    // f(c, z) and zeta(c) share one channel pass
    auto eval = [&](const ChirpParams& at, const RVec& z, double& zeta) {
        ++run.evaluations;
        comm_ici_powers(obj.paths, at.c1, at.c2, obj.x.span(), pw);
        double f = 0.0, acc = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double den = pw.interference[i] + obj.delta;
            f += 2.0 * z[i] * std::sqrt(pw.signal[i]) - z[i] * z[i] * den;
            acc += pw.signal[i] / den;
        }
        zeta = acc / double(z.size());
        return f;
    };
    ChirpParams visited = start;
    double visited_zeta = sir(start, obj).linear;
    run.evaluations = 1;
    auto note = [&](const ChirpParams& at, double zeta) {
        if (zeta > visited_zeta || (zeta == visited_zeta && lex_less(at, visited))) {
            visited_zeta = zeta;
            visited = at;
        }
    };

    for (std::size_t outer = 0; outer < cfg.max_iters; ++outer) {
        const ChirpParams c_prev = c;
        const RVec z = update_auxiliary(c.c1, c.c2, obj);
        ++run.evaluations;
        AdamState adam;
        adam.cfg = cfg.adam;
        double zeta = 0.0;
        ChirpParams best = c;
        double best_f = eval(c, z, zeta);
        if (!std::isfinite(best_f)) {
            run.aborted = true;
            break;
        }
        ChirpParams cur = c;
        double cur_f = best_f;
        for (std::size_t inner = 0; inner < cfg.max_iters; ++inner) {
            const auto g = numerical_gradient(obj, z, cur.c1, cur.c2, cfg.grad_step);
            run.evaluations += 4;
            if (!std::isfinite(g[0]) || !std::isfinite(g[1])) {
                run.aborted = true;
                break;
            }
            const auto inc = adam.step(g);
            const ChirpParams next(cur.c1 + inc[0], cur.c2 + inc[1]);
            ++run.adam_steps;
            const double moved = torus_dist(next, cur);
            cur = next;
            cur_f = eval(cur, z, zeta);
            if (!std::isfinite(cur_f)) {
                run.aborted = true;
                break;
            }
            note(cur, zeta);
            if (cur_f > best_f) {
                best_f = cur_f;
                best = cur;
            }
            if (moved < cfg.eps_con) break;
        }
        if (run.aborted) break;
        c = cfg.keep_best_iterate ? best : cur;
        run.surrogate_trace.push_back(cfg.keep_best_iterate ? best_f : cur_f);
        ++run.outer_iters;
        if (torus_dist(c, c_prev) < cfg.eps_con) break;
    }
    run.final_value = sir(c, obj);
    ++run.evaluations;
    if (cfg.track_best_visited && visited_zeta > run.final_value.linear) {
        run.c = visited;
        run.value = {visited_zeta, sir_to_db(visited_zeta)};
    } else {
        run.c = c;
        run.value = run.final_value;
    }
    return run;
}

SirOptResult optimize_sir(const SirObjective& obj, const SirOptConfig& cfg) {
    obj.validate();
    cfg.validate();
    SirOptResult out;
    bool have = false;
    for (std::size_t i = 0; i < cfg.blocks_c1; ++i) {
        for (std::size_t j = 0; j < cfg.blocks_c2; ++j) {
            const ChirpParams start((double(i) + 0.5) / double(cfg.blocks_c1),
                                    (double(j) + 0.5) / double(cfg.blocks_c2));
            SirBlockRun run = run_sir_block(obj, start, cfg);
            out.evaluations += run.evaluations;
            if (run.aborted) {
                std::cerr << "warning: sir block (" << i << ", " << j
                          << ") hit a non-finite surrogate; skipped\n";
                ++out.skipped_blocks;
                out.blocks.push_back(std::move(run));
                continue;
            }
            const bool better =
                !have || run.value.linear > out.value.linear ||
                (run.value.linear == out.value.linear && lex_less(run.c, out.c));
            if (better) {
                out.c = run.c;
                out.value = run.value;
                have = true;
            }
            out.blocks.push_back(std::move(run));
        }
    }
    if (!have) {
        // every block aborted; fall back to the first block centre
        out.c = ChirpParams(0.5 / double(cfg.blocks_c1), 0.5 / double(cfg.blocks_c2));
        out.value = sir(out.c, obj);
    }
    return out;
}

RVec sir_grid(const SirObjective& obj, std::size_t grid_c1, std::size_t grid_c2) {
    RVec out(grid_c1 * grid_c2);
    for (std::size_t i = 0; i < grid_c1; ++i) {
        for (std::size_t j = 0; j < grid_c2; ++j) {
            out[i * grid_c2 + j] = sir(double(i) / double(grid_c1), double(j) / double(grid_c2), obj).linear;
        }
    }
    return out;
}

StaticSirResult static_afdm_sir_baseline(const std::vector<SirObjective>& ensemble,
                                         std::size_t grid_c1, std::size_t grid_c2) {
    if (ensemble.empty()) throw InvalidArgument("static_afdm_sir_baseline: empty ensemble");
    if (grid_c1 == 0 || grid_c2 == 0) throw InvalidArgument("static_afdm_sir_baseline: empty grid");
    RVec sum(grid_c1 * grid_c2, 0.0);
    for (const auto& obj : ensemble) {
        const RVec g = sir_grid(obj, grid_c1, grid_c2);
        for (std::size_t k = 0; k < g.size(); ++k) sum[k] += g[k];
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < sum.size(); ++k) {
        if (sum[k] > sum[best]) best = k;  // first (lexicographic) index wins ties
    }
    StaticSirResult out;
    out.c = ChirpParams(double(best / grid_c2) / double(grid_c1),
                        double(best % grid_c2) / double(grid_c2));
    out.mean_linear = sum[best] / double(ensemble.size());
    for (const auto& obj : ensemble) out.per_realization_db.push_back(sir(out.c, obj).db);
    return out;
}

}  // namespace agile_afdm
