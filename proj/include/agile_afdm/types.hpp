// types.hpp - core value types shared by every Agile-AFDM module
//
// ChirpParams is the optimisation variable of the whole library: the pair
// (c1, c2) reduced onto the unit torus [0,1)^2.  SymbolBlock and TimeSignal
// are thin validated wrappers over complex vectors.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace agile_afdm {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using RVec = std::vector<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Thrown for malformed inputs (wrong sizes, non-finite values, bad ranges).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Reduce a real number onto [0, 1).
inline double wrap_unit(double v) {
    double r = v - std::floor(v);
    // floor() of values like -1e-18 gives r == 1.0
    return r >= 1.0 ? 0.0 : r;
}

/// exp(j 2 pi frac(v)); argument reduced first so large v keeps full accuracy.
inline cplx unit_phasor(double v) {
    const double f = v - std::round(v);
    return {std::cos(kTwoPi * f), std::sin(kTwoPi * f)};
}

struct ChirpParams {
    double c1 = 0.0;
    double c2 = 0.0;

    ChirpParams() = default;
    ChirpParams(double a, double b) : c1(wrap_unit(a)), c2(wrap_unit(b)) {
        if (!std::isfinite(a) || !std::isfinite(b)) {
            throw InvalidArgument("ChirpParams: non-finite chirp parameter");
        }
    }

    friend bool operator==(const ChirpParams&, const ChirpParams&) = default;
};

/// Lexicographic order, used for deterministic tie-breaks.
inline bool lex_less(const ChirpParams& a, const ChirpParams& b) {
    return a.c1 < b.c1 || (a.c1 == b.c1 && a.c2 < b.c2);
}

/// Data symbols in the DAF domain.  Length must be positive and even.
class SymbolBlock {
public:
    SymbolBlock() = default;
    explicit SymbolBlock(CVec symbols) : x_(std::move(symbols)) {
        if (x_.empty()) throw InvalidArgument("SymbolBlock: N must be positive");
        if (x_.size() % 2 != 0) throw InvalidArgument("SymbolBlock: N must be even");
        for (const auto& v : x_) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                throw InvalidArgument("SymbolBlock: non-finite symbol");
            }
        }
    }

    std::size_t size() const { return x_.size(); }
    const cplx& operator[](std::size_t i) const { return x_[i]; }
    std::span<const cplx> span() const { return x_; }
    const CVec& values() const { return x_; }

    double energy() const {
        double e = 0.0;
        for (const auto& v : x_) e += std::norm(v);
        return e;
    }

private:
    CVec x_;
};

/// Time-domain samples, optionally oversampled by an integer factor.
class TimeSignal {
public:
    TimeSignal() = default;
    TimeSignal(CVec samples, std::size_t oversample = 1, double sample_period = 1.0)
        : s_(std::move(samples)), oversample_(oversample), sample_period_(sample_period) {
        if (oversample_ == 0) throw InvalidArgument("TimeSignal: oversample factor must be >= 1");
        if (s_.size() % oversample_ != 0) {
            throw InvalidArgument("TimeSignal: length not divisible by oversample factor");
        }
    }

    std::size_t size() const { return s_.size(); }
    std::size_t oversample() const { return oversample_; }
    double sample_period() const { return sample_period_; }
    const cplx& operator[](std::size_t i) const { return s_[i]; }
    std::span<const cplx> span() const { return s_; }
    const CVec& values() const { return s_; }
    CVec& mutable_values() { return s_; }

    double energy() const {
        double e = 0.0;
        for (const auto& v : s_) e += std::norm(v);
        return e;
    }

private:
    CVec s_;
    std::size_t oversample_ = 1;
    double sample_period_ = 1.0;
};

}  // namespace agile_afdm
