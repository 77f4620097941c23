// channel.hpp - doubly-dispersive channels in the time and DAF domains
//
// The DAF-domain matrices are assembled from the closed form
//   H[p,q] = 1/N sum_i h_i exp(j2pi/N (N c1 l_i^2 - q l_i + N c2 (q^2 - p^2))) F_i(p,q)
// with the Dirichlet-type kernel F of psi_i = p - q + nu_i + 2 N c1 l_i.
// Delays are real-valued here; integer delays are required only by the
// time-domain construction.

#pragma once

#include "agile_afdm/rng.hpp"
#include "agile_afdm/types.hpp"

#include <Eigen/Dense>

#include <vector>

namespace agile_afdm {

struct ChannelPath {
    cplx gain{1.0, 0.0};
    double delay = 0.0;    // samples
    double doppler = 0.0;  // normalised: nu = N f
};

struct PathSet {
    std::vector<ChannelPath> paths;
    double noise_power = 0.0;

    /// Throws unless P >= 1, every gain finite, delays non-negative integers
    /// and (when prefix_len > 0) every delay below the prefix length.
    void validate(std::size_t prefix_len = 0) const;
};

struct SensingTarget {
    cplx reflection{1.0, 0.0};
    double delay = 0.0;
    double doppler = 0.0;
};

struct EffectiveChannel {
    Eigen::MatrixXcd h;
    std::size_t size() const { return static_cast<std::size_t>(h.rows()); }
};

/// Tolerance on the distance of psi/N to the nearest integer.
inline constexpr double kAlignmentTol = 1e-9;

/// sum_{n=0}^{N-1} exp(-j2pi psi n / N).
cplx dirichlet_kernel(double psi, std::size_t n);

/// d/dpsi of dirichlet_kernel, evaluated in closed form.
cplx dirichlet_kernel_derivative(double psi, std::size_t n);

/// F_i(p, q) for one path.
cplx kernel_F(std::size_t p, std::size_t q, double doppler, double delay, double c1,
              std::size_t n);

/// Effective DAF-domain channel of a multipath set.  Raw c1/c2 are not reduced.
EffectiveChannel effective_comm_channel(const PathSet& paths, double c1, double c2,
                                        std::size_t n);
EffectiveChannel effective_comm_channel(const PathSet& paths, const ChirpParams& c,
                                        std::size_t n);

/// Effective monostatic sensing channel (single path with reflection alpha).
EffectiveChannel effective_sens_channel(const SensingTarget& target, double c1, double c2,
                                        std::size_t n);
EffectiveChannel effective_sens_channel(const SensingTarget& target, const ChirpParams& c,
                                        std::size_t n);

/// sum_i h_i Gamma_CPP,i Delta_{f_i} Pi^{l_i}; integer delays only.
Eigen::MatrixXcd time_domain_comm_channel(const PathSet& paths, double c1, std::size_t n);

/// Diagonal of the CPP compensation matrix for one integer delay.
CVec cpp_compensation(std::size_t delay, double c1, std::size_t n);

struct IciPowers {
    RVec signal;        // |H[p,p] x[p]|^2
    RVec interference;  // |sum_{q != p} H[p,q] x[q]|^2
};

IciPowers ici_decompose(const EffectiveChannel& h, const SymbolBlock& x);

/// Same split computed straight from the path set without materialising H.
/// The common row phase exp(-j2pi c2 p^2) is dropped; it has unit modulus.
void comm_ici_powers(const PathSet& paths, double c1, double c2, std::span<const cplx> x,
                     IciPowers& out);

/// u = G x for the unit-reflection sensing channel G = H_sens / alpha.
void sens_response(double delay, double doppler, double c1, double c2,
                   std::span<const cplx> x, CVec& out);

/// y = H x + w with w ~ CN(0, N0 I), drawn from the given stream.
CVec apply_channel(const EffectiveChannel& h, const SymbolBlock& x, double noise_power,
                   Stream& rng);

}  // namespace agile_afdm
