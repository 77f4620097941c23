// baselines.hpp - comparator PAPR reduction schemes (plain OFDM, clipping,
// selective mapping, partial transmit sequences)

#pragma once

#include "agile_afdm/papr.hpp"
#include "agile_afdm/types.hpp"

#include <cstdint>

namespace agile_afdm {

struct BaselineConfig {
    double clipping_ratio = 2.0;  // amplitude threshold relative to rms
    std::size_t slm_candidates = 16;
    std::size_t pts_subblocks = 4;
    CVec pts_alphabet = {cplx{1.0, 0.0}, cplx{-1.0, 0.0}};
    std::size_t eval_budget = 16;

    void validate() const;
};

/// OFDM is AFDM with c2 = 0 (c1 does not affect the envelope).
double ofdm_papr(const SymbolBlock& x, std::size_t oversample);

/// Amplitude clipping at CR * rms(s); phases are kept.
TimeSignal clip(const TimeSignal& s, double clipping_ratio);

struct BaselineResult {
    double papr_db = 0.0;
    std::size_t papr_evaluations = 0;
    std::size_t selected = 0;  // mask / phase-vector index (side information)
    CVec symbols;              // the transmitted (rotated) DAF-domain block
};

/// PAPR after clipping the oversampled envelope; one evaluation.
BaselineResult clipping_papr(const SymbolBlock& x, double clipping_ratio,
                             std::size_t oversample);

/// Phase mask u of the SLM family (u = 0 is the identity).
CVec slm_mask(std::size_t n, std::size_t u, std::uint64_t seed);

BaselineResult slm(const SymbolBlock& x, const BaselineConfig& cfg, std::size_t oversample,
                   std::uint64_t seed);

/// Phase vector with index `code` (mixed radix over the alphabet, first entry 1).
CVec pts_phase_vector(std::size_t code, std::size_t subblocks, const CVec& alphabet);

BaselineResult pts(const SymbolBlock& x, const BaselineConfig& cfg, std::size_t oversample,
                   std::uint64_t seed);

}  // namespace agile_afdm
