#include "agile_afdm/papr.hpp"

#include "agile_afdm/daft.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace agile_afdm {

double papr_db_of_samples(std::span<const cplx> s) {
    if (s.empty()) throw InvalidArgument("papr: empty signal");
    double peak = 0.0;
    double sum = 0.0;
    for (const auto& v : s) {
        const double p = std::norm(v);
        peak = std::max(peak, p);
        sum += p;
    }
    if (!(sum > 0.0)) throw InvalidArgument("papr: zero-power signal");
    return 10.0 * std::log10(peak / (sum / static_cast<double>(s.size())));
}

double PaprEvaluator::operator()(std::span<const cplx> x, double c2) {
    double energy = 0.0;
    for (const auto& v : x) energy += std::norm(v);
    if (!(energy > 0.0)) throw InvalidArgument("papr: zero block");
    oversampled_envelope_into(x, c2, oversample_, buffer_);
    ++evaluations_;
    double peak = 0.0;
    for (const auto& v : buffer_) peak = std::max(peak, std::norm(v));
    // Mean envelope power is ||x||^2 / N exactly.
    return 10.0 * std::log10(peak / (energy / static_cast<double>(x.size())));
}

double papr_db(const SymbolBlock& x, double c2, std::size_t oversample) {
    PaprEvaluator eval(oversample);
    return eval(x.span(), c2);
}

double papr_db_full(const SymbolBlock& x, double c1, double c2, std::size_t oversample) {
    const TimeSignal env = oversampled_envelope(x, c2, oversample);
    const double n = static_cast<double>(x.size());
    const double l = static_cast<double>(oversample);
    CVec s = env.values();
    for (std::size_t k = 0; k < s.size(); ++k) {
        // t = k T_s / L  ->  c1 (t / T_s)^2
        const double tn = static_cast<double>(k) / l;
        s[k] *= unit_phasor(c1 * tn * tn);
    }
    double peak = 0.0;
    for (const auto& v : s) peak = std::max(peak, std::norm(v));
    return 10.0 * std::log10(peak / (x.energy() / n));
}

// --- envelope coefficients -------------------------------------------------

RVec EnvelopeCoefficients::cos_coeffs() const {
    RVec a(n, 0.0);
    for (std::size_t p = 1; p < n; ++p) a[p] = gamma[0][p] + gamma[1][p];
    return a;
}

RVec EnvelopeCoefficients::sin_coeffs() const {
    RVec b(n, 0.0);
    for (std::size_t p = 1; p < n; ++p) b[p] = gamma[2][p] + gamma[3][p];
    return b;
}

EnvelopeCoefficients envelope_coefficients(const SymbolBlock& x, double c2) {
    const std::size_t n = x.size();
    EnvelopeCoefficients out;
    out.n = n;
    for (auto& g : out.gamma) g.assign(n, 0.0);
    for (auto& r : out.rho) r.assign(n, 0.0);
    out.lambda.assign(n * n, 0.0);
    out.mu.assign(n * n, 0.0);

    for (std::size_t p = 1; p < n; ++p) {
        for (std::size_t m = 0; m + p < n; ++m) {
            const cplx prod = x[m + p] * std::conj(x[m]);
            const double lam = prod.real();
            const double mu = prod.imag();
            out.lambda[m * n + p] = lam;
            out.mu[m * n + p] = mu;

            const double w = static_cast<double>(p) * static_cast<double>(2 * m + p);
            const cplx e = unit_phasor(c2 * w);  // (cos beta, sin beta)
            const double cb = e.real();
            const double sb = e.imag();
            out.gamma[0][p] += lam * cb;
            out.gamma[1][p] -= mu * sb;
            out.gamma[2][p] -= lam * sb;
            out.gamma[3][p] -= mu * cb;
            out.rho[0][p] -= w * lam * sb;
            out.rho[1][p] -= w * mu * cb;
            out.rho[2][p] -= w * lam * cb;
            out.rho[3][p] += w * mu * sb;
        }
    }
    return out;
}

double envelope_g(const EnvelopeCoefficients& coeffs, double theta) {
    double g = 0.0;
    for (std::size_t p = 1; p < coeffs.n; ++p) {
        const double ph = static_cast<double>(p) * theta;
        g += (coeffs.gamma[0][p] + coeffs.gamma[1][p]) * std::cos(ph) +
             (coeffs.gamma[2][p] + coeffs.gamma[3][p]) * std::sin(ph);
    }
    return g;
}

// --- quartic trigonometric integrals ---------------------------------------

namespace {

// Row i-1 of the selector matrix; columns follow the delta vector
// [k+l+m+n, k+l-m-n, k+l+m-n, k+l-m+n, k-l+m+n, k-l-m-n, k-l+m-n, k-l-m+n].
constexpr int kQ[16][8] = {
    {0, +1, +1, +1, +1, +1, +1, +1},
    {0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, 0},
    {0, -1, +1, +1, -1, -1, +1, +1},
    {0, 0, 0, 0, 0, 0, 0, 0},
    {0, +1, +1, -1, +1, -1, -1, +1},
    {0, +1, -1, +1, +1, -1, +1, -1},
    {0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, 0},
    {0, +1, +1, -1, -1, +1, +1, -1},
    {0, +1, -1, +1, -1, +1, -1, +1},
    {0, 0, 0, 0, 0, 0, 0, 0},
    {0, -1, -1, -1, +1, +1, +1, +1},
    {0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, 0},
    {0, +1, -1, -1, -1, -1, +1, +1},
};

constexpr int selector_row(const std::array<Trig, 4>& kinds) {
    int i = 0;
    for (int j = 0; j < 4; ++j) {
        if (kinds[static_cast<std::size_t>(j)] == Trig::Sin) i |= 1 << (3 - j);
    }
    return i;
}

double quartic_unchecked(int row, int k, int l, int m, int n) {
    const int sums[8] = {k + l + m + n, k + l - m - n, k + l + m - n, k + l - m + n,
                         k - l + m + n, k - l - m - n, k - l + m - n, k - l - m + n};
    int acc = 0;
    for (int j = 0; j < 8; ++j) {
        if (sums[j] == 0) acc += kQ[row][j];
    }
    return std::numbers::pi / 4.0 * static_cast<double>(acc);
}

}  // namespace

double quartic_trig_integral(const std::array<Trig, 4>& kinds, int k, int l, int m, int n,
                             std::size_t block_size) {
    const int hi = static_cast<int>(block_size) - 1;
    for (int v : {k, l, m, n}) {
        if (v < 1 || v > hi) {
            throw InvalidArgument("quartic_trig_integral: index out of range [1, N-1]");
        }
    }
    return quartic_unchecked(selector_row(kinds), k, l, m, n);
}

// --- trigonometric series --------------------------------------------------

double TrigSeries::operator()(double t) const {
    double v = a.empty() ? 0.0 : a[0];
    for (std::size_t k = 1; k < a.size(); ++k) {
        v += a[k] * std::cos(double(k) * t) + b[k] * std::sin(double(k) * t);
    }
    return v;
}

TrigSeries multiply(const TrigSeries& f, const TrigSeries& g) {
    const std::size_t fa = f.max_freq();
    const std::size_t fb = g.max_freq();
    TrigSeries out(fa + fb);
    for (std::size_t i = 0; i <= fa; ++i) {
        const double ai = f.a[i];
        const double bi = i == 0 ? 0.0 : f.b[i];
        if (ai == 0.0 && bi == 0.0) continue;
        for (std::size_t j = 0; j <= fb; ++j) {
            const double aj = g.a[j];
            const double bj = j == 0 ? 0.0 : g.b[j];
            const std::size_t s = i + j;
            const std::size_t d = i > j ? i - j : j - i;
            const double sgn = i >= j ? 1.0 : -1.0;  // sin(i - j) = sgn * sin|i - j|
            // cos i cos j, sin i sin j
            out.a[s] += 0.5 * (ai * aj - bi * bj);
            out.a[d] += 0.5 * (ai * aj + bi * bj);
            // cos i sin j = (sin(i+j) - sin(i-j))/2, sin i cos j = (sin(i+j) + sin(i-j))/2
            out.b[s] += 0.5 * (ai * bj + bi * aj);
            if (d != 0) out.b[d] += 0.5 * sgn * (bi * aj - ai * bj);
        }
    }
    out.b[0] = 0.0;
    return out;
}

double integrate_product(const TrigSeries& f, const TrigSeries& g) {
    const std::size_t k = std::min(f.max_freq(), g.max_freq());
    double acc = kTwoPi * f.a[0] * g.a[0];
    for (std::size_t i = 1; i <= k; ++i) {
        acc += std::numbers::pi * (f.a[i] * g.a[i] + f.b[i] * g.b[i]);
    }
    return acc;
}

namespace {

TrigSeries g_series(const EnvelopeCoefficients& c) {
    TrigSeries g(c.n - 1);
    for (std::size_t p = 1; p < c.n; ++p) {
        g.a[p] = c.gamma[0][p] + c.gamma[1][p];
        g.b[p] = c.gamma[2][p] + c.gamma[3][p];
    }
    return g;
}

// d g / d c2; the rho coefficients carry the derivative of beta without its
// 2 pi factor, which is restored here.
TrigSeries dg_series(const EnvelopeCoefficients& c) {
    TrigSeries g(c.n - 1);
    for (std::size_t p = 1; p < c.n; ++p) {
        g.a[p] = kTwoPi * (c.rho[0][p] + c.rho[1][p]);
        g.b[p] = kTwoPi * (c.rho[2][p] + c.rho[3][p]);
    }
    return g;
}

}  // namespace

double papr_surrogate(const SymbolBlock& x, double c2) {
    if (x.size() < 2) return 0.0;
    const auto coeffs = envelope_coefficients(x, c2);
    const TrigSeries g = g_series(coeffs);
    const TrigSeries g2 = multiply(g, g);
    return integrate_product(g2, g2);
}

double surrogate_derivative(const SymbolBlock& x, double c2) {
    if (x.size() < 2) return 0.0;
    const auto coeffs = envelope_coefficients(x, c2);
    const TrigSeries g = g_series(coeffs);
    const TrigSeries dg = dg_series(coeffs);
    const TrigSeries g3 = multiply(multiply(g, g), g);
    return 4.0 * integrate_product(g3, dg);
}

double surrogate_derivative_enumerated(const SymbolBlock& x, double c2) {
    const std::size_t nsz = x.size();
    if (nsz < 2) return 0.0;
    const auto coeffs = envelope_coefficients(x, c2);
    const TrigSeries g = g_series(coeffs);
    const TrigSeries dg = dg_series(coeffs);
    const int hi = static_cast<int>(nsz) - 1;

    auto coef = [](const TrigSeries& s, Trig kind, int idx) {
        return kind == Trig::Cos ? s.a[static_cast<std::size_t>(idx)]
                                 : s.b[static_cast<std::size_t>(idx)];
    };

    double acc = 0.0;
    for (int k = 1; k <= hi; ++k) {
        for (int l = 1; l <= hi; ++l) {
            for (int m = 1; m <= hi; ++m) {
                // Every non-zero integral needs one of the delta arguments to vanish;
                // solve each for n.
                const int cand[7] = {k + l - m, k + l + m, m - k - l, l - k - m,
                                     k - l - m, k - l + m, l + m - k};
                std::set<int> ns;
                for (int v : cand) {
                    if (v >= 1 && v <= hi) ns.insert(v);
                }
                for (int n : ns) {
                    for (int row = 0; row < 16; ++row) {
                        const std::array<Trig, 4> kinds = {
                            (row & 8) ? Trig::Sin : Trig::Cos, (row & 4) ? Trig::Sin : Trig::Cos,
                            (row & 2) ? Trig::Sin : Trig::Cos, (row & 1) ? Trig::Sin : Trig::Cos};
                        const double w = coef(g, kinds[0], k) * coef(g, kinds[1], l) *
                                         coef(g, kinds[2], m) * coef(dg, kinds[3], n);
                        if (w == 0.0) continue;
                        acc += w * quartic_unchecked(row, k, l, m, n);
                    }
                }
            }
        }
    }
    return 4.0 * acc;
}

// --- Algorithm: coarse-to-fine c2 search ------------------------------------

void PaprSearchConfig::validate() const {
    if (!(coarse_step > 0.0) || coarse_step > 0.5) {
        throw InvalidArgument("PaprSearchConfig: coarse_step must lie in (0, 1/2]");
    }
    if (!(fine_step > 0.0) || fine_step > coarse_step) {
        throw InvalidArgument("PaprSearchConfig: fine_step must lie in (0, coarse_step]");
    }
    const double ratio = coarse_step / fine_step;
    if (std::abs(ratio - std::round(ratio)) > 1e-6) {
        throw InvalidArgument("PaprSearchConfig: coarse_step / fine_step must be an integer");
    }
    if (eval_budget == 0) throw InvalidArgument("PaprSearchConfig: eval_budget must be >= 1");
}

PaprSearchResult optimize_papr_c2(const SymbolBlock& x, const PaprSearchConfig& cfg,
                                  std::size_t oversample) {
    cfg.validate();
    if (!(x.energy() > 0.0)) throw InvalidArgument("optimize_papr_c2: zero block");

    PaprSearchResult res;
    const auto n_coarse = static_cast<std::size_t>(std::floor(0.5 / cfg.coarse_step + 1e-9));
    const auto ratio = static_cast<std::size_t>(std::llround(cfg.coarse_step / cfg.fine_step));

    auto deriv = [&](double c2) {
        ++res.derivative_evaluations;
        return surrogate_derivative(x, c2);
    };

    // Coarse grid plus its right neighbour (the last one wraps to c2 = 1/2).
    RVec coarse(n_coarse + 1);
    for (std::size_t i = 0; i <= n_coarse; ++i) coarse[i] = deriv(double(i) * cfg.coarse_step);

    // Fine candidates keyed by integer position in fine-step units.
    std::set<std::size_t> omega;
    for (std::size_t i = 0; i < n_coarse; ++i) {
        if (!(coarse[i] <= 0.0 && coarse[i + 1] >= 0.0)) continue;
        const std::size_t base = i * ratio;
        RVec fine(ratio + 2);
        for (std::size_t j = 0; j <= ratio + 1; ++j) {
            fine[j] = (j == 0) ? coarse[i]
                      : (j == ratio) ? coarse[i + 1]
                                     : deriv(double(base + j) * cfg.fine_step);
        }
        for (std::size_t j = 0; j <= ratio; ++j) {
            if (fine[j] <= 0.0 && fine[j + 1] >= 0.0) omega.insert(base + j);
        }
    }

    const std::size_t period_units = n_coarse * ratio;
    std::vector<double> cands;
    if (omega.empty()) {
        res.fallback = true;
        for (std::size_t i = 0; i < n_coarse; ++i) cands.push_back(double(i) * cfg.coarse_step);
    } else {
        std::set<std::size_t> reduced;
        for (auto u : omega) reduced.insert(period_units ? u % period_units : u);
        for (auto u : reduced) cands.push_back(double(u) * cfg.fine_step);
    }
    res.candidates = cands.size();

    if (cands.size() > cfg.eval_budget) {
        // Keep the candidates with the smallest surrogate value.
        std::vector<std::pair<double, double>> ranked;
        ranked.reserve(cands.size());
        for (double c : cands) ranked.emplace_back(papr_surrogate(x, c), c);
        std::sort(ranked.begin(), ranked.end());
        cands.clear();
        for (std::size_t i = 0; i < cfg.eval_budget; ++i) cands.push_back(ranked[i].second);
        std::sort(cands.begin(), cands.end());
    }

    PaprEvaluator eval(oversample);
    res.papr_db = std::numeric_limits<double>::infinity();
    for (double c : cands) {
        const double v = eval(x.span(), c);
        if (v < res.papr_db) {
            res.papr_db = v;
            res.c2 = c;
        }
    }
    res.papr_evaluations = eval.evaluations();
    return res;
}

}  // namespace agile_afdm
