#include "agile_afdm/crlb.hpp"

#include "agile_afdm/channel.hpp"
#include "agile_afdm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace agile_afdm {
namespace {

cplx inner(const CVec& a, const CVec& b) {
    cplx acc{};
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

double norm2(const CVec& a) {
    double acc = 0.0;
    for (const auto& v : a) acc += std::norm(v);
    return acc;
}

Crlb solve(double jl, double jn, double xi, double snr) {
    const double det = jl * jn - xi * xi;
    if (!(snr > 0.0)) throw InvalidArgument("crlb: snr must be > 0");
    if (!(det > kSingularTol * jl * jn) || !(jl > 0.0) || !(jn > 0.0)) {
        throw Unidentifiable("crlb: singular effective FIM");
    }
    return {jn / (2.0 * snr * det), jl / (2.0 * snr * det)};
}

}  // namespace

ReferenceSignal reference_signal(double delay, double doppler, double c1, double c2,
                                 const SymbolBlock& x, double h_l, double h_nu) {
    if (!(h_l > 0.0) || !(h_nu > 0.0)) throw InvalidArgument("reference_signal: steps must be > 0");
    ReferenceSignal r;
    const auto xs = x.span();
    sens_response(delay, doppler, c1, c2, xs, r.u);
    CVec plus, minus;
    sens_response(delay + h_l, doppler, c1, c2, xs, plus);
    sens_response(delay - h_l, doppler, c1, c2, xs, minus);
    r.u_l.resize(plus.size());
    for (std::size_t i = 0; i < plus.size(); ++i) r.u_l[i] = (plus[i] - minus[i]) / (2.0 * h_l);
    sens_response(delay, doppler + h_nu, c1, c2, xs, plus);
    sens_response(delay, doppler - h_nu, c1, c2, xs, minus);
    r.u_nu.resize(plus.size());
    for (std::size_t i = 0; i < plus.size(); ++i) r.u_nu[i] = (plus[i] - minus[i]) / (2.0 * h_nu);
    return r;
}

FimSummary fim_summary(const ReferenceSignal& r, double snr) {
    FimSummary s;
    s.snr = snr;
    s.norm_u2 = norm2(r.u);
    if (!(s.norm_u2 > 0.0)) throw InvalidArgument("fim_summary: reference signal is zero");
    s.norm_ul2 = norm2(r.u_l);
    s.norm_unu2 = norm2(r.u_nu);
    const cplx ul_unu = inner(r.u_l, r.u_nu);
    s.re_ul_unu = ul_unu.real();
    s.ul_u = inner(r.u_l, r.u);
    s.unu_u = inner(r.u_nu, r.u);
    s.phi_l = s.norm_ul2 - std::norm(s.ul_u) / s.norm_u2;
    s.phi_nu = s.norm_unu2 - std::norm(s.unu_u) / s.norm_u2;
    // Re{<u_l,u><u,u_nu>}
    s.xi = s.re_ul_unu - (s.ul_u * std::conj(s.unu_u)).real() / s.norm_u2;
    return s;
}

FimSummary fim_summary(double delay, double doppler, double c1, double c2, const SymbolBlock& x,
                       double snr) {
    return fim_summary(reference_signal(delay, doppler, c1, c2, x), snr);
}

Eigen::Matrix4d full_fim(const ReferenceSignal& r, cplx alpha, double noise_power) {
    const std::size_t n = r.u.size();
    Eigen::MatrixXcd d(n, 4);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        d(k, 0) = alpha * r.u_l[i];
        d(k, 1) = alpha * r.u_nu[i];
        d(k, 2) = r.u[i];
        d(k, 3) = cplx(0.0, 1.0) * r.u[i];
    }
    return (2.0 / noise_power) * (d.adjoint() * d).real();
}

Eigen::Matrix2d schur_effective(const Eigen::Matrix4d& j) {
    const Eigen::Matrix2d tt = j.topLeftCorner<2, 2>();
    const Eigen::Matrix2d tk = j.topRightCorner<2, 2>();
    const Eigen::Matrix2d kk = j.bottomRightCorner<2, 2>();
    return tt - tk * kk.inverse() * tk.transpose();
}

Crlb crlb(const FimSummary& s) { return solve(s.phi_l, s.phi_nu, s.xi, s.snr); }

Crlb crlb_unchecked(const FimSummary& s) {
    const double det = s.phi_l * s.phi_nu - s.xi * s.xi;
    if (!(det > 0.0) || !(s.snr > 0.0)) throw Unidentifiable("crlb: effective FIM not positive definite");
    return {s.phi_nu / (2.0 * s.snr * det), s.phi_l / (2.0 * s.snr * det)};
}

Crlb crlb_ideal(const FimSummary& s) {
    return solve(s.norm_ul2, s.norm_unu2, s.re_ul_unu, s.snr);
}

void PsoConfig::validate() const {
    if (particles == 0) throw InvalidArgument("pso: particles must be >= 1");
    if (max_iters == 0) throw InvalidArgument("pso: max_iters must be >= 1");
    if (!(wf > 0.0 && wf <= w0 && w0 < 1.0)) {
        throw InvalidArgument("pso: inertia must satisfy 0 < wf <= w0 < 1");
    }
    if (!(phi_c > 0.0) || !(phi_s > 0.0)) throw InvalidArgument("pso: phi_c, phi_s must be > 0");
    if (!(eps_con > 0.0)) throw InvalidArgument("pso: eps_con must be > 0");
    if (!(lo < hi) || lo < 0.0 || hi >= 1.0) throw InvalidArgument("pso: bounds must satisfy 0 <= lo < hi < 1");
    if (patience == 0) throw InvalidArgument("pso: patience must be >= 1");
}

PsoResult pso_minimize(const Objective2d& f, const PsoConfig& cfg, std::uint64_t seed,
                       const std::vector<Point2d>& starts) {
    cfg.validate();
    if (starts.size() > cfg.particles) throw InvalidArgument("pso: more start points than particles");
    const std::size_t np = cfg.particles;
    const double inf = std::numeric_limits<double>::infinity();
    auto eval = [&](double a, double b) {
        const double v = f(a, b);
        return std::isfinite(v) ? v : inf;
    };
    auto clamp = [&](double v) { return std::clamp(v, cfg.lo, cfg.hi); };

    std::vector<Stream> rng;
    rng.reserve(np);
    std::vector<Point2d> pos(np), vel(np), pbest(np);
    RVec pval(np);
    PsoResult out;
    for (std::size_t i = 0; i < np; ++i) {
        rng.emplace_back(seed, StreamTag::Particle, i);
        pos[i] = {cfg.lo + (cfg.hi - cfg.lo) * rng[i].uniform(),
                  cfg.lo + (cfg.hi - cfg.lo) * rng[i].uniform()};
        if (i < starts.size()) pos[i] = {clamp(starts[i][0]), clamp(starts[i][1])};
        vel[i] = {0.0, 0.0};
        pbest[i] = pos[i];
        pval[i] = eval(pos[i][0], pos[i][1]);
    }
    out.evaluations = np;
    auto argmin = [&] {
        std::size_t b = 0;
        for (std::size_t i = 1; i < np; ++i) {
            if (pval[i] < pval[b]) b = i;
        }
        return b;
    };
    std::size_t g = argmin();
    Point2d gbest = pbest[g];
    double gval = pval[g];
    out.best_trace.push_back(gval);

    std::size_t quiet = 0;
    for (std::size_t it = 0; it < cfg.max_iters; ++it) {
        const double w = cfg.w0 - (cfg.w0 - cfg.wf) * double(it) / double(cfg.max_iters);
        for (std::size_t i = 0; i < np; ++i) {
            const double r1 = rng[i].uniform();
            const double r2 = rng[i].uniform();
            for (int d = 0; d < 2; ++d) {
                vel[i][d] = w * vel[i][d] + cfg.phi_c * r1 * (pbest[i][d] - pos[i][d]) +
                            cfg.phi_s * r2 * (gbest[d] - pos[i][d]);
                pos[i][d] = clamp(pos[i][d] + vel[i][d]);
            }
            const double v = eval(pos[i][0], pos[i][1]);
            if (v < pval[i]) {
                pval[i] = v;
                pbest[i] = pos[i];
            }
        }
        out.evaluations += np;
        ++out.iterations;
        g = argmin();
        const double moved = std::hypot(pbest[g][0] - gbest[0], pbest[g][1] - gbest[1]);
        if (pval[g] < gval) {
            gval = pval[g];
            gbest = pbest[g];
        }
        out.best_trace.push_back(gval);
        quiet = moved < cfg.eps_con ? quiet + 1 : 0;
        if (quiet >= cfg.patience) break;
    }
    out.c = ChirpParams(gbest[0], gbest[1]);
    out.value = gval;
    return out;
}

Sensitivity sensitivity_rv_cv(const RVec& values) {
    if (values.size() < 2) throw InvalidArgument("sensitivity_rv_cv: need at least two values");
    double lo = values[0], hi = values[0], sum = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidArgument("sensitivity_rv_cv: non-finite value");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
    }
    if (!(lo > 0.0)) throw InvalidArgument("sensitivity_rv_cv: values must be > 0");
    const double mean = sum / double(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= double(values.size());
    return {(hi - lo) / lo * 100.0, std::sqrt(var) / mean * 100.0};
}

}  // namespace agile_afdm
