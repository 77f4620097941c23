// papr.hpp - PAPR of the AFDM envelope and per-block c2 optimisation
//
// The envelope power expands as
//   |s(t)|^2 = (1/N) sum_m |x[m]|^2 + (2/N) g(t),
//   g(t) = sum_{p=1}^{N-1} (g1_p + g2_p) cos(2pi p t/T) + (g3_p + g4_p) sin(2pi p t/T),
// where the gamma coefficients depend on c2 only through
// beta_{m,p}(c2) = 2pi c2 p (2m + p).  c1 never enters the envelope modulus.
//
// Time is rescaled so that one symbol period maps to theta in [0, 2pi);
// the surrogate is I(c2) = int_0^{2pi} g(theta)^4 dtheta.

#pragma once

#include "agile_afdm/types.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace agile_afdm {

/// PAPR in dB of the L-times oversampled envelope.  Throws on an all-zero block.
double papr_db(const SymbolBlock& x, double c2, std::size_t oversample);

/// Envelope PAPR with the c1 chirp included (used to show c1-independence).
double papr_db_full(const SymbolBlock& x, double c1, double c2, std::size_t oversample);

/// Reusable evaluator that counts PAPR evaluations and avoids reallocations.
class PaprEvaluator {
public:
    explicit PaprEvaluator(std::size_t oversample) : oversample_(oversample) {}

    double operator()(std::span<const cplx> x, double c2);
    /// PAPR of pre-phased symbols (c2 = 0 path); used by the SLM/PTS baselines.
    double evaluate_plain(std::span<const cplx> x) { return (*this)(x, 0.0); }

    std::size_t evaluations() const { return evaluations_; }
    std::size_t oversample() const { return oversample_; }

private:
    std::size_t oversample_;
    std::size_t evaluations_ = 0;
    CVec buffer_;
};

/// PAPR in dB of already-synthesised samples: max |s|^2 / mean |s|^2.
double papr_db_of_samples(std::span<const cplx> s);

/// Trig-series coefficients of g and of d g / d c2 (index p = 0..N-1, p = 0 unused).
struct EnvelopeCoefficients {
    std::size_t n = 0;
    std::array<RVec, 4> gamma;
    std::array<RVec, 4> rho;
    // lambda[m * n + p] = Re{x[m+p] x*[m]}, mu likewise Im; zero for m + p >= N.
    RVec lambda;
    RVec mu;

    double lambda_at(std::size_t m, std::size_t p) const { return lambda[m * n + p]; }
    double mu_at(std::size_t m, std::size_t p) const { return mu[m * n + p]; }

    /// Combined cosine / sine coefficients of g.
    RVec cos_coeffs() const;
    RVec sin_coeffs() const;
};

EnvelopeCoefficients envelope_coefficients(const SymbolBlock& x, double c2);

/// g(theta) evaluated from its coefficients, theta in radians over one period.
double envelope_g(const EnvelopeCoefficients& coeffs, double theta);

enum class Trig { Cos, Sin };

/**
 * int_0^{2pi} w1(k t) w2(l t) w3(m t) w4(n t) dt for w_i in {cos, sin},
 * evaluated with the closed-form selector matrix.  Indices must lie in
 * [1, N-1].
 */
double quartic_trig_integral(const std::array<Trig, 4>& kinds, int k, int l, int m, int n,
                             std::size_t block_size);

/// Real trigonometric polynomial sum_k a_k cos(k t) + b_k sin(k t).
struct TrigSeries {
    RVec a;
    RVec b;

    explicit TrigSeries(std::size_t max_freq = 0) : a(max_freq + 1, 0.0), b(max_freq + 1, 0.0) {}
    std::size_t max_freq() const { return a.empty() ? 0 : a.size() - 1; }
    double operator()(double t) const;
};

/// Exact product of two trig polynomials (product-to-sum).
TrigSeries multiply(const TrigSeries& f, const TrigSeries& g);

/// int_0^{2pi} f(t) g(t) dt.
double integrate_product(const TrigSeries& f, const TrigSeries& g);

/// I(c2) = int_0^{2pi} g^4.
double papr_surrogate(const SymbolBlock& x, double c2);

/// I'(c2) = 4 int g^3 dg/dc2, exact.  Uses trig-series products, O(N^2).
double surrogate_derivative(const SymbolBlock& x, double c2);

/// Same quantity by summing quartic_trig_integral over every contributing
/// (k, l, m, n) tuple.  O(N^3); meant for cross-checks on small blocks.
double surrogate_derivative_enumerated(const SymbolBlock& x, double c2);

struct PaprSearchConfig {
    double coarse_step = 1.0 / 80.0;
    double fine_step = 1.0 / 3120.0;
    std::size_t eval_budget = 128;

    void validate() const;
};

struct PaprSearchResult {
    double c2 = 0.0;
    double papr_db = 0.0;
    std::size_t papr_evaluations = 0;
    std::size_t derivative_evaluations = 0;
    std::size_t candidates = 0;  // |Omega| after refinement
    bool fallback = false;       // Omega was empty; searched the coarse grid
};

/// Coarse-to-fine search for the c2 in [0, 1/2) that minimises PAPR.
PaprSearchResult optimize_papr_c2(const SymbolBlock& x, const PaprSearchConfig& cfg,
                                  std::size_t oversample);

}  // namespace agile_afdm
