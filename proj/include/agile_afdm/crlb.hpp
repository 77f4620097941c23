// crlb.hpp - delay/Doppler CRLBs with an unknown reflection coefficient
//
// Observation chi = alpha G(l, nu) x + noise.  u = G x and its partial
// derivatives drive the FIM; the complex alpha is a nuisance parameter and is
// removed by a Schur complement, which leaves the 2x2 effective FIM
//   J_eff = 2 snr [[Phi_l, Xi], [Xi, Phi_nu]].

#pragma once

#include "agile_afdm/types.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace agile_afdm {

/// Singular effective FIM: delay and Doppler cannot both be estimated.
class Unidentifiable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ReferenceSignal {
    CVec u;
    CVec u_l;
    CVec u_nu;
};

inline constexpr double kJacobianStep = 1e-4;

/// u = G(l, nu) x, with u_l and u_nu from central differences on the closed form.
ReferenceSignal reference_signal(double delay, double doppler, double c1, double c2,
                                 const SymbolBlock& x, double h_l = kJacobianStep,
                                 double h_nu = kJacobianStep);

struct FimSummary {
    double phi_l = 0.0;
    double phi_nu = 0.0;
    double xi = 0.0;
    double snr = 0.0;
    // raw norms and inner products, <a, b> = a^H b
    double norm_ul2 = 0.0;
    double norm_unu2 = 0.0;
    double re_ul_unu = 0.0;
    cplx ul_u{};
    cplx unu_u{};
    double norm_u2 = 0.0;
};

FimSummary fim_summary(const ReferenceSignal& r, double snr);
FimSummary fim_summary(double delay, double doppler, double c1, double c2, const SymbolBlock& x,
                       double snr);

/// Full 4x4 FIM over (l, nu, Re alpha, Im alpha).
Eigen::Matrix4d full_fim(const ReferenceSignal& r, cplx alpha, double noise_power);

/// Schur complement of the nuisance block of a 4x4 FIM.
Eigen::Matrix2d schur_effective(const Eigen::Matrix4d& j);

struct Crlb {
    double delay = 0.0;
    double doppler = 0.0;
};

/// Relative singularity threshold on det(J_eff).
inline constexpr double kSingularTol = 1e-12;

Crlb crlb(const FimSummary& s);
/// The same formulas without the singularity test; requires det > 0.
Crlb crlb_unchecked(const FimSummary& s);
/// alpha known: raw norms in place of the projected ones.
Crlb crlb_ideal(const FimSummary& s);

struct PsoConfig {
    std::size_t particles = 200;
    std::size_t max_iters = 100;
    double w0 = 0.99;
    double wf = 0.4;
    double phi_c = 1.2;
    double phi_s = 1.8;
    double eps_con = 1e-6;
    double lo = 0.0;
    double hi = 0.999;
    // consecutive sub-eps_con global-best moves needed to stop
    std::size_t patience = 10;

    void validate() const;
};

struct PsoResult {
    ChirpParams c;
    double value = 0.0;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    std::vector<double> best_trace;  // global-best value per iteration
};

using Objective2d = std::function<double(double, double)>;

using Point2d = std::array<double, 2>;

/// Minimise over [lo, hi]^2.  Non-finite values count as +inf.  Optional start
/// points replace the random initial positions of the first particles.
PsoResult pso_minimize(const Objective2d& f, const PsoConfig& cfg, std::uint64_t seed,
                       const std::vector<Point2d>& starts = {});

struct Sensitivity {
    double rv = 0.0;  // percent
    double cv = 0.0;  // percent, population std
};

Sensitivity sensitivity_rv_cv(const RVec& values);

}  // namespace agile_afdm
