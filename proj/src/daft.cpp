#include "agile_afdm/daft.hpp"

#include "agile_afdm/fft.hpp"

namespace agile_afdm {
namespace {

// exp(j2pi c k^2)
inline cplx chirp(double c, std::size_t k) {
    const double kk = static_cast<double>(k) * static_cast<double>(k);
    return unit_phasor(c * kk);
}

}  // namespace

TimeSignal idaft(const SymbolBlock& x, double c1, double c2) {
    const std::size_t n = x.size();
    if (n == 0) throw InvalidArgument("idaft: empty block");
    CVec v(n);
    for (std::size_t m = 0; m < n; ++m) v[m] = x[m] * chirp(c2, m);
    fft::inverse_inplace(v);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) v[k] *= scale * chirp(c1, k);
    return TimeSignal(std::move(v));
}

TimeSignal idaft(const SymbolBlock& x, const ChirpParams& c) { return idaft(x, c.c1, c.c2); }

SymbolBlock daft(const TimeSignal& r, double c1, double c2) {
    const std::size_t n = r.size();
    if (n == 0) throw InvalidArgument("daft: empty signal");
    CVec v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = r[k] * std::conj(chirp(c1, k));
    fft::forward_inplace(v);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t m = 0; m < n; ++m) v[m] *= scale * std::conj(chirp(c2, m));
    return SymbolBlock(std::move(v));
}

SymbolBlock daft(const TimeSignal& r, const ChirpParams& c) { return daft(r, c.c1, c.c2); }

SymbolBlock daft(const TimeSignal& r, const ChirpParams& c, std::size_t expected_n) {
    if (r.size() != expected_n) {
        throw InvalidArgument("daft: signal length " + std::to_string(r.size()) +
                              " does not match N = " + std::to_string(expected_n));
    }
    return daft(r, c);
}

Eigen::MatrixXcd daft_matrix(double c1, double c2, std::size_t n) {
    Eigen::MatrixXcd a(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t k = 0; k < n; ++k) {
            const double ph = -(c1 * double(k * k) + c2 * double(m * m) +
                                double((m * k) % n) / double(n));
            a(m, k) = scale * unit_phasor(ph);
        }
    }
    return a;
}

TimeSignal append_cpp(const TimeSignal& s, double c1, std::size_t prefix_len) {
    const std::size_t n = s.size();
    if (prefix_len >= n) {
        throw InvalidArgument("append_cpp: prefix length must be < N");
    }
    CVec out(n + prefix_len);
    const double nn = static_cast<double>(n);
    for (std::size_t i = 0; i < prefix_len; ++i) {
        // i-th output sample is time index n_t = i - prefix_len (negative).
        const double nt = static_cast<double>(i) - static_cast<double>(prefix_len);
        out[i] = s[n - prefix_len + i] * unit_phasor(-c1 * (nn * nn + 2.0 * nn * nt));
    }
    std::copy(s.values().begin(), s.values().end(), out.begin() + static_cast<std::ptrdiff_t>(prefix_len));
    return TimeSignal(std::move(out));
}

void oversampled_envelope_into(std::span<const cplx> x, double c2, std::size_t oversample,
                               CVec& out) {
    const std::size_t n = x.size();
    if (n == 0) throw InvalidArgument("oversampled_envelope: empty block");
    if (oversample == 0) throw InvalidArgument("oversampled_envelope: L must be >= 1");
    out.assign(n * oversample, cplx{});
    for (std::size_t m = 0; m < n; ++m) out[m] = x[m] * chirp(c2, m);
    fft::inverse_inplace(out);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : out) v *= scale;
}

TimeSignal oversampled_envelope(const SymbolBlock& x, double c2, std::size_t oversample) {
    CVec out;
    oversampled_envelope_into(x.span(), c2, oversample, out);
    return TimeSignal(std::move(out), oversample);
}

}  // namespace agile_afdm
