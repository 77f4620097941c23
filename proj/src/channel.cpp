#include "agile_afdm/channel.hpp"

#include "agile_afdm/fft.hpp"

#include <string>

namespace agile_afdm {
namespace {

// psi reduced to [-N/2, N/2); the kernel is N-periodic in psi.
double reduce_psi(double psi, double nn) { return psi - nn * std::round(psi / nn); }

// exp(j pi d / N) for d in [-(N-1), N-1], and the N-th roots of unity.
struct Tables {
    std::size_t n = 0;
    CVec half;   // index d + N - 1
    CVec roots;  // exp(-j 2pi k / N)
};

const Tables& tables(std::size_t n) {
    thread_local Tables t;
    if (t.n != n) {
        const double nn = static_cast<double>(n);
        t.half.resize(2 * n - 1);
        for (std::size_t i = 0; i < 2 * n - 1; ++i) {
            t.half[i] = unit_phasor((double(i) - (nn - 1.0)) / (2.0 * nn));
        }
        t.roots.resize(n);
        for (std::size_t k = 0; k < n; ++k) t.roots[k] = unit_phasor(-double(k) / nn);
        t.n = n;
    }
    return t;
}

// Per-path factors of the closed form: the kernel over p - q, and the
// q-dependent phase (times gain / N).  The p-dependent phase is separate.
struct PathFactors {
    CVec kern;
    CVec col;
};

// F(d + b) for all d.  F(psi) = exp(-j pi b) sin(pi b) exp(j theta) / sin(theta) with
// theta = pi psi / N, so only the two b-dependent phasors need trig calls.
void fill_kernel(double b, std::size_t n, CVec& kern) {
    const Tables& t = tables(n);
    const double nn = static_cast<double>(n);
    const auto ni = static_cast<std::ptrdiff_t>(n);
    kern.resize(2 * n - 1);
    const double b2 = b - 2.0 * std::round(b / 2.0);
    const cplx amp = unit_phasor(-b2 / 2.0) * std::sin(std::numbers::pi * b2);
    const cplx rot = unit_phasor(b / (2.0 * nn));
    for (std::ptrdiff_t d = -(ni - 1); d <= ni - 1; ++d) {
        const double psi = double(d) + b;
        const auto i = static_cast<std::size_t>(d + ni - 1);
        if (std::abs(reduce_psi(psi, nn)) < 0.5) {
            kern[i] = dirichlet_kernel(psi, n);  // near the singularity
        } else {
            const cplx e = rot * t.half[i];
            kern[i] = amp * e / e.imag();
        }
    }
}

// chirp[k] = exp(j 2pi c2 k^2), shared by all paths of one evaluation.
// Recurrence chirp[k+1] = chirp[k] exp(j 2pi c2 (2k+1)), reseeded every 8 samples.
void fill_chirp(double c2, std::size_t n, CVec& chirp) {
    chirp.resize(n);
    const cplx twice = unit_phasor(2.0 * c2);
    cplx r{};
    for (std::size_t k = 0; k < n; ++k) {
        const double kk = double(k);
        if (k % 8 == 0) {
            chirp[k] = unit_phasor(c2 * kk * kk);
            r = unit_phasor(c2 * (2.0 * kk + 1.0));
        } else {
            chirp[k] = chirp[k - 1] * r;
            r *= twice;
        }
    }
}

// out[m] = exp(-j 2pi b m / N) from two 8-entry tables.
void fill_phase_ramp(double b, std::size_t n, CVec& out) {
    out.resize(n);
    const double step = -b / static_cast<double>(n);
    cplx lo[8];
    for (int u = 0; u < 8; ++u) lo[u] = unit_phasor(step * u);
    for (std::size_t h = 0; h < n; h += 8) {
        const cplx hi = unit_phasor(step * double(h));
        for (std::size_t u = 0; u < 8 && h + u < n; ++u) out[h + u] = hi * lo[u];
    }
}

bool integer_delay(double delay) { return delay == std::floor(delay) && std::abs(delay) < 1e9; }

// exp(-j 2pi k l / N) for k < N
void fill_delay_phase(double delay, std::size_t n, CVec& out) {
    out.resize(n);
    if (integer_delay(delay)) {
        const Tables& t = tables(n);
        const auto l = static_cast<long long>(delay);
        const auto ni = static_cast<long long>(n);
        for (std::size_t k = 0; k < n; ++k) {
            const long long idx = ((static_cast<long long>(k) * l) % ni + ni) % ni;
            out[k] = t.roots[static_cast<std::size_t>(idx)];
        }
    } else {
        fill_phase_ramp(delay, n, out);
    }
}

void path_factors(cplx gain, double delay, double doppler, double c1, const CVec& chirp,
                  std::size_t n, PathFactors& f) {
    const double nn = static_cast<double>(n);
    fill_kernel(doppler + 2.0 * nn * c1 * delay, n, f.kern);
    fill_delay_phase(delay, n, f.col);
    const cplx common = gain * unit_phasor(c1 * delay * delay) / nn;
    for (std::size_t k = 0; k < n; ++k) f.col[k] *= common * chirp[k];
}

// Adds one path to the DAF-domain accumulator u of y = FFT(u):
//   u[m] += g exp(-j2pi b m/N) V[m - l],  V = IDFT(exp(-j2pi q l/N) chirp x)
// with b = nu + 2 N c1 l and g = h exp(j2pi c1 l^2)/N.  This is the kernel sum
// written out, so H x costs O(N log N) per path instead of O(N^2).
// shared_v holds IDFT(chirp x), reused for integer delays.
void accumulate_path(cplx gain, double delay, double doppler, double c1, const CVec& v,
                     const CVec& shared_v, CVec& u) {
    thread_local CVec ramp, w;
    const std::size_t n = v.size();
    const double nn = static_cast<double>(n);
    const double b = doppler + 2.0 * nn * c1 * delay;
    const cplx g = gain * unit_phasor(c1 * delay * delay) / nn;
    fill_phase_ramp(b, n, ramp);
    if (integer_delay(delay)) {
        const auto l = static_cast<std::size_t>(static_cast<long long>(delay) % static_cast<long long>(n));
        for (std::size_t m = 0; m < n; ++m) u[m] += g * ramp[m] * shared_v[(m + n - l) % n];
    } else {
        fill_delay_phase(delay, n, w);
        for (std::size_t q = 0; q < n; ++q) w[q] *= v[q];
        fft::inverse_inplace(w);
        for (std::size_t m = 0; m < n; ++m) u[m] += g * ramp[m] * w[m];
    }
}

// Accumulate one path's contribution into h.
void add_path(Eigen::MatrixXcd& h, cplx gain, double delay, double doppler, double c1,
              double c2, std::size_t n) {
    const auto ni = static_cast<std::ptrdiff_t>(n);
    PathFactors f;
    CVec chirp;
    fill_chirp(c2, n, chirp);
    path_factors(gain, delay, doppler, c1, chirp, n, f);
    CVec row(n);
    for (std::size_t k = 0; k < n; ++k) row[k] = std::conj(chirp[k]);
    for (std::ptrdiff_t q = 0; q < ni; ++q) {
        const cplx cq = f.col[static_cast<std::size_t>(q)];
        for (std::ptrdiff_t p = 0; p < ni; ++p) {
            h(p, q) += row[static_cast<std::size_t>(p)] * cq *
                       f.kern[static_cast<std::size_t>(p - q + ni - 1)];
        }
    }
}

}  // namespace

void comm_ici_powers(const PathSet& paths, double c1, double c2, std::span<const cplx> x,
                     IciPowers& out) {
    const std::size_t n = x.size();
    const double nn = static_cast<double>(n);
    thread_local CVec chirp, v, shared_v, u, diag, dphase;
    fill_chirp(c2, n, chirp);
    v.resize(n);
    for (std::size_t q = 0; q < n; ++q) v[q] = chirp[q] * x[q];
    shared_v = v;
    fft::inverse_inplace(shared_v);
    u.assign(n, cplx{});
    diag.assign(n, cplx{});
    for (const auto& path : paths.paths) {
        accumulate_path(path.gain, path.delay, path.doppler, c1, v, shared_v, u);
        // H[p,p] x[p] without the unit-modulus row phase
        const double b = path.doppler + 2.0 * nn * c1 * path.delay;
        const cplx g = path.gain * unit_phasor(c1 * path.delay * path.delay) / nn *
                       dirichlet_kernel(b, n);
        fill_delay_phase(path.delay, n, dphase);
        for (std::size_t p = 0; p < n; ++p) diag[p] += g * dphase[p] * v[p];
    }
    fft::forward_inplace(u);
    out.signal.resize(n);
    out.interference.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        out.signal[p] = std::norm(diag[p]);
        out.interference[p] = std::norm(u[p] - diag[p]);
    }
}

void sens_response(double delay, double doppler, double c1, double c2,
                   std::span<const cplx> x, CVec& out) {
    const std::size_t n = x.size();
    thread_local CVec chirp, v, shared_v;
    fill_chirp(c2, n, chirp);
    v.resize(n);
    for (std::size_t q = 0; q < n; ++q) v[q] = chirp[q] * x[q];
    if (integer_delay(delay)) {
        shared_v = v;
        fft::inverse_inplace(shared_v);
    }
    out.assign(n, cplx{});
    accumulate_path(cplx{1.0, 0.0}, delay, doppler, c1, v, shared_v, out);
    fft::forward_inplace(out);
    for (std::size_t p = 0; p < n; ++p) out[p] *= std::conj(chirp[p]);
}

void PathSet::validate(std::size_t prefix_len) const {
    if (paths.empty()) throw InvalidArgument("PathSet: at least one path required");
    if (!(noise_power >= 0.0) || !std::isfinite(noise_power)) {
        throw InvalidArgument("PathSet: noise power must be finite and >= 0");
    }
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const auto& p = paths[i];
        const std::string where = "PathSet: path " + std::to_string(i);
        if (!std::isfinite(p.gain.real()) || !std::isfinite(p.gain.imag())) {
            throw InvalidArgument(where + " has non-finite gain");
        }
        if (!std::isfinite(p.doppler)) throw InvalidArgument(where + " has non-finite Doppler");
        if (p.delay < 0.0 || p.delay != std::floor(p.delay)) {
            throw InvalidArgument(where + " delay must be a non-negative integer");
        }
        if (prefix_len > 0 && p.delay >= static_cast<double>(prefix_len)) {
            throw InvalidArgument(where + " delay exceeds the prefix length");
        }
    }
}

cplx dirichlet_kernel(double psi, std::size_t n) {
    const double nn = static_cast<double>(n);
    const double r = reduce_psi(psi, nn);
    if (std::abs(r / nn) < kAlignmentTol) return {nn, 0.0};
    // (e^{-j2pi psi} - 1)/(e^{-j2pi psi/N} - 1) written as a phase times a
    // ratio of sines, which stays accurate next to the removable singularity.
    const double num = std::sin(std::numbers::pi * r);
    const double den = std::sin(std::numbers::pi * r / nn);
    const double ph = -std::numbers::pi * r * (nn - 1.0) / nn;
    return std::polar(num / den, ph);
}

cplx dirichlet_kernel_derivative(double psi, std::size_t n) {
    const double nn = static_cast<double>(n);
    const double r = reduce_psi(psi, nn);
    const double pi = std::numbers::pi;
    if (std::abs(r / nn) < kAlignmentTol) {
        // sum -j2pi n/N at psi = 0
        return {0.0, -pi * (nn - 1.0)};
    }
    const double a = pi * r;
    const double b = pi * r / nn;
    const double ratio = std::sin(a) / std::sin(b);
    const double dratio =
        (pi * std::cos(a) * std::sin(b) - std::sin(a) * (pi / nn) * std::cos(b)) /
        (std::sin(b) * std::sin(b));
    const cplx phase = std::polar(1.0, -pi * r * (nn - 1.0) / nn);
    const cplx dphase = phase * cplx(0.0, -pi * (nn - 1.0) / nn);
    return dphase * ratio + phase * dratio;
}

cplx kernel_F(std::size_t p, std::size_t q, double doppler, double delay, double c1,
              std::size_t n) {
    if (p >= n || q >= n) throw InvalidArgument("kernel_F: index out of range");
    const double psi = double(p) - double(q) + doppler + 2.0 * double(n) * c1 * delay;
    return dirichlet_kernel(psi, n);
}

EffectiveChannel effective_comm_channel(const PathSet& paths, double c1, double c2,
                                        std::size_t n) {
    if (n == 0) throw InvalidArgument("effective_comm_channel: N must be positive");
    if (paths.paths.empty()) throw InvalidArgument("effective_comm_channel: empty path set");
    EffectiveChannel out{Eigen::MatrixXcd::Zero(n, n)};
    for (const auto& p : paths.paths) add_path(out.h, p.gain, p.delay, p.doppler, c1, c2, n);
    return out;
}

EffectiveChannel effective_comm_channel(const PathSet& paths, const ChirpParams& c,
                                        std::size_t n) {
    return effective_comm_channel(paths, c.c1, c.c2, n);
}

EffectiveChannel effective_sens_channel(const SensingTarget& t, double c1, double c2,
                                        std::size_t n) {
    if (n == 0) throw InvalidArgument("effective_sens_channel: N must be positive");
    EffectiveChannel out{Eigen::MatrixXcd::Zero(n, n)};
    add_path(out.h, t.reflection, t.delay, t.doppler, c1, c2, n);
    return out;
}

EffectiveChannel effective_sens_channel(const SensingTarget& t, const ChirpParams& c,
                                        std::size_t n) {
    return effective_sens_channel(t, c.c1, c.c2, n);
}

CVec cpp_compensation(std::size_t delay, double c1, std::size_t n) {
    const double nn = static_cast<double>(n);
    CVec g(n, cplx{1.0, 0.0});
    for (std::size_t k = 0; k < std::min(delay, n); ++k) {
        const double shift = double(delay) - double(k);
        g[k] = unit_phasor(-c1 * (nn * nn - 2.0 * nn * shift));
    }
    return g;
}

Eigen::MatrixXcd time_domain_comm_channel(const PathSet& paths, double c1, std::size_t n) {
    paths.validate();
    const double nn = static_cast<double>(n);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& path : paths.paths) {
        const auto delay = static_cast<std::size_t>(path.delay);
        const CVec gamma = cpp_compensation(delay, c1, n);
        const double f = path.doppler / nn;
        // Row k of Gamma Delta Pi^l picks input sample (k - l) mod N.
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t src = (k + n - delay % n) % n;
            h(static_cast<std::ptrdiff_t>(k), static_cast<std::ptrdiff_t>(src)) +=
                path.gain * gamma[k] * unit_phasor(-f * double(k));
        }
    }
    return h;
}

IciPowers ici_decompose(const EffectiveChannel& h, const SymbolBlock& x) {
    const std::size_t n = x.size();
    if (h.size() != n || static_cast<std::size_t>(h.h.cols()) != n) {
        throw InvalidArgument("ici_decompose: dimension mismatch");
    }
    IciPowers out{RVec(n), RVec(n)};
    for (std::size_t p = 0; p < n; ++p) {
        cplx ici{};
        const auto pi = static_cast<std::ptrdiff_t>(p);
        for (std::size_t q = 0; q < n; ++q) {
            if (q != p) ici += h.h(pi, static_cast<std::ptrdiff_t>(q)) * x[q];
        }
        out.signal[p] = std::norm(h.h(pi, pi) * x[p]);
        out.interference[p] = std::norm(ici);
    }
    return out;
}

CVec apply_channel(const EffectiveChannel& h, const SymbolBlock& x, double noise_power,
                   Stream& rng) {
    const std::size_t n = x.size();
    if (h.size() != n) throw InvalidArgument("apply_channel: dimension mismatch");
    Eigen::VectorXcd xv(n);
    for (std::size_t i = 0; i < n; ++i) xv(static_cast<std::ptrdiff_t>(i)) = x[i];
    Eigen::VectorXcd y = h.h * xv;
    CVec out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = y(static_cast<std::ptrdiff_t>(i));
        if (noise_power > 0.0) out[i] += rng.complex_normal(noise_power);
    }
    return out;
}

}  // namespace agile_afdm
