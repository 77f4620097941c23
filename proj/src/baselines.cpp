#include "agile_afdm/baselines.hpp"

#include "agile_afdm/daft.hpp"
#include "agile_afdm/rng.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace agile_afdm {

void BaselineConfig::validate() const {
    if (!(clipping_ratio > 1.0)) throw InvalidArgument("BaselineConfig: clipping_ratio must be > 1");
    if (slm_candidates == 0) throw InvalidArgument("BaselineConfig: slm_candidates must be >= 1");
    if (pts_subblocks == 0) throw InvalidArgument("BaselineConfig: pts_subblocks must be >= 1");
    if (pts_alphabet.empty()) throw InvalidArgument("BaselineConfig: empty PTS alphabet");
    for (const auto& a : pts_alphabet) {
        if (std::abs(std::abs(a) - 1.0) > 1e-12) {
            throw InvalidArgument("BaselineConfig: PTS phases must have unit modulus");
        }
    }
    if (eval_budget == 0) throw InvalidArgument("BaselineConfig: eval_budget must be >= 1");
    if (slm_candidates > eval_budget) {
        throw InvalidArgument("BaselineConfig: slm_candidates exceeds eval_budget");
    }
}

double ofdm_papr(const SymbolBlock& x, std::size_t oversample) { return papr_db(x, 0.0, oversample); }

TimeSignal clip(const TimeSignal& s, double clipping_ratio) {
    if (!(clipping_ratio > 0.0)) throw InvalidArgument("clip: clipping ratio must be > 0");
    const double n = static_cast<double>(s.size());
    const double rms = n > 0 ? std::sqrt(s.energy() / n) : 0.0;
    const double limit = clipping_ratio * rms;
    CVec out = s.values();
    if (std::isfinite(limit)) {
        for (auto& v : out) {
            const double a = std::abs(v);
            if (a > limit) v *= limit / a;
        }
    }
    return TimeSignal(std::move(out), s.oversample(), s.sample_period());
}

BaselineResult clipping_papr(const SymbolBlock& x, double clipping_ratio,
                             std::size_t oversample) {
    if (!(x.energy() > 0.0)) throw InvalidArgument("clipping_papr: zero block");
    const TimeSignal env = oversampled_envelope(x, 0.0, oversample);
    const TimeSignal clipped = clip(env, clipping_ratio);
    BaselineResult r;
    r.papr_db = papr_db_of_samples(clipped.span());
    r.papr_evaluations = 1;
    r.symbols = x.values();
    return r;
}

CVec slm_mask(std::size_t n, std::size_t u, std::uint64_t seed) {
    CVec mask(n, cplx{1.0, 0.0});
    if (u == 0) return mask;
    static const cplx kQpsk[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    Stream rng(seed, StreamTag::SlmMask, u);
    for (auto& m : mask) m = kQpsk[rng.below(4)];
    return mask;
}

BaselineResult slm(const SymbolBlock& x, const BaselineConfig& cfg, std::size_t oversample,
                   std::uint64_t seed) {
    cfg.validate();
    PaprEvaluator eval(oversample);
    BaselineResult best;
    best.papr_db = std::numeric_limits<double>::infinity();
    CVec cand(x.size());
    for (std::size_t u = 0; u < cfg.slm_candidates; ++u) {
        const CVec mask = slm_mask(x.size(), u, seed);
        for (std::size_t i = 0; i < x.size(); ++i) cand[i] = x[i] * mask[i];
        const double v = eval.evaluate_plain(cand);
        if (v < best.papr_db) {
            best.papr_db = v;
            best.selected = u;
            best.symbols = cand;
        }
    }
    best.papr_evaluations = eval.evaluations();
    return best;
}

CVec pts_phase_vector(std::size_t code, std::size_t subblocks, const CVec& alphabet) {
    CVec b(subblocks, cplx{1.0, 0.0});
    const std::size_t w = alphabet.size();
    for (std::size_t v = 1; v < subblocks; ++v) {
        b[v] = alphabet[code % w];
        code /= w;
    }
    return b;
}

BaselineResult pts(const SymbolBlock& x, const BaselineConfig& cfg, std::size_t oversample,
                   std::uint64_t seed) {
    cfg.validate();
    const std::size_t n = x.size();
    const std::size_t v = cfg.pts_subblocks;
    if (n % v != 0) throw InvalidArgument("pts: sub-block count must divide N");
    const std::size_t len = n / v;

    // Total combinations W^(V-1), saturating.
    std::size_t total = 1;
    for (std::size_t i = 1; i < v; ++i) {
        if (total > std::numeric_limits<std::size_t>::max() / cfg.pts_alphabet.size()) {
            total = std::numeric_limits<std::size_t>::max();
            break;
        }
        total *= cfg.pts_alphabet.size();
    }

    std::vector<std::size_t> codes;
    if (total <= cfg.eval_budget) {
        codes.resize(total);
        std::iota(codes.begin(), codes.end(), std::size_t{0});
    } else {
        // Identity plus distinct seeded draws.
        Stream rng(seed, StreamTag::PtsSample);
        codes.push_back(0);
        while (codes.size() < cfg.eval_budget) {
            const std::size_t c = static_cast<std::size_t>(rng.below(total));
            if (std::find(codes.begin(), codes.end(), c) == codes.end()) codes.push_back(c);
        }
    }

    PaprEvaluator eval(oversample);
    BaselineResult best;
    best.papr_db = std::numeric_limits<double>::infinity();
    CVec cand(n);
    for (std::size_t code : codes) {
        const CVec b = pts_phase_vector(code, v, cfg.pts_alphabet);
        for (std::size_t i = 0; i < n; ++i) cand[i] = x[i] * b[i / len];
        const double val = eval.evaluate_plain(cand);
        if (val < best.papr_db) {
            best.papr_db = val;
            best.selected = code;
            best.symbols = cand;
        }
    }
    best.papr_evaluations = eval.evaluations();
    return best;
}

}  // namespace agile_afdm
