// fft.hpp - thin FFTW wrapper with a process-wide plan cache
//
// Planning is serialised behind a mutex (the FFTW planner is not
// re-entrant); execution through the new-array interface is thread safe.

#pragma once

#include "agile_afdm/types.hpp"

#include <span>

namespace agile_afdm::fft {

/// Unnormalised forward DFT: X[k] = sum_n x[n] e^{-j2pi nk/M}.
CVec forward(std::span<const cplx> x);

/// Unnormalised inverse DFT: x[n] = sum_k X[k] e^{+j2pi nk/M}.
CVec inverse(std::span<const cplx> X);

/// In-place variants (no allocation beyond the cached plan).
void forward_inplace(CVec& x);
void inverse_inplace(CVec& x);

}  // namespace agile_afdm::fft
