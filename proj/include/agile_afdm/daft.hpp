// daft.hpp - unitary discrete affine Fourier transform and prefix handling
//
//   s = A^H x,   A = Lambda_c2 F Lambda_c1,
//   s[n] = 1/sqrt(N) sum_m x[m] exp(j2pi(c1 n^2 + c2 m^2 + nm/N))
//
// The F stage runs through an FFT, so both directions are O(N log N).

#pragma once

#include "agile_afdm/types.hpp"

#include <Eigen/Dense>

namespace agile_afdm {

/// Time-domain modulation (IDAFT).  Power preserving.
TimeSignal idaft(const SymbolBlock& x, const ChirpParams& c);

/// Raw-parameter variant; c1, c2 are used as given (no reduction mod 1).
TimeSignal idaft(const SymbolBlock& x, double c1, double c2);

/// Demodulation back to the DAF domain.  Expects the prefix already removed.
SymbolBlock daft(const TimeSignal& r, const ChirpParams& c);
SymbolBlock daft(const TimeSignal& r, double c1, double c2);

/// Strict-size overload: throws if r.size() != expected_n.
SymbolBlock daft(const TimeSignal& r, const ChirpParams& c, std::size_t expected_n);

/// Dense N x N DAFT matrix A (rows = DAF index).  Used by time-domain checks.
Eigen::MatrixXcd daft_matrix(double c1, double c2, std::size_t n);

/**
 * Prepend a chirp-periodic prefix of length prefix_len:
 *   s[n] = s[N+n] exp(-j2pi c1 (N^2 + 2Nn)),  n = -prefix_len .. -1.
 * When 2N c1 is an integer and N is even this is the ordinary cyclic prefix.
 */
TimeSignal append_cpp(const TimeSignal& s, double c1, std::size_t prefix_len);

/**
 * Samples of the continuous envelope s(t) on the grid t = n T_s / L,
 * n = 0 .. N L - 1.  The c1 chirp has unit modulus, so it is omitted: the
 * returned samples have the right magnitude but not the c1 phase.
 */
TimeSignal oversampled_envelope(const SymbolBlock& x, double c2, std::size_t oversample);

/// Same as above but into a caller-owned buffer of size N*L (hot loops).
void oversampled_envelope_into(std::span<const cplx> x, double c2, std::size_t oversample,
                               CVec& out);

}  // namespace agile_afdm
