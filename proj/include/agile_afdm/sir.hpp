// sir.hpp - SIR metric and the block-partitioned FP / Adam optimiser
//
// zeta(c) = 1/N sum_p Psig_p / (Pint_p + delta).  The optimiser maximises the
// quadratic-transform surrogate f(c, z) = sum_p 2 z_p sqrt(Psig_p) - z_p^2 (Pint_p + delta)
// by alternating a closed-form z update with Adam ascent in c.

#pragma once

#include "agile_afdm/channel.hpp"
#include "agile_afdm/types.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace agile_afdm {

inline constexpr double kSirDelta = 1e-12;
/// Display cap for zeta in dB (reached only when the ICI is numerically zero).
inline constexpr double kSirCapDb = 120.0;

struct SirObjective {
    PathSet paths;
    SymbolBlock x;
    double delta = kSirDelta;

    void validate() const;
};

struct SirValue {
    double linear = 0.0;
    double db = 0.0;  // 10 log10(linear), capped at kSirCapDb
};

double sir_to_db(double linear);

/// Raw c1/c2 are used as given (no reduction); the metric is 1-periodic anyway.
SirValue sir(double c1, double c2, const SirObjective& obj);
SirValue sir(const ChirpParams& c, const SirObjective& obj);

RVec update_auxiliary(double c1, double c2, const SirObjective& obj);
double fp_surrogate(double c1, double c2, const RVec& z, const SirObjective& obj);

/// Central-difference gradient of fp_surrogate in (c1, c2) with z held fixed.
std::array<double, 2> numerical_gradient(const SirObjective& obj, const RVec& z, double c1,
                                         double c2, double step = 1e-6);

struct AdamConfig {
    double alpha = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam for ascent on a 2-vector.
struct AdamState {
    std::array<double, 2> m{0.0, 0.0};
    std::array<double, 2> v{0.0, 0.0};
    long t = 0;
    AdamConfig cfg;

    /// Returns the increment to add to the parameters.
    std::array<double, 2> step(const std::array<double, 2>& grad);
};

struct SirOptConfig {
    std::size_t blocks_c1 = 4;
    std::size_t blocks_c2 = 4;
    double eps_con = 1e-6;
    std::size_t max_iters = 50;
    double grad_step = 1e-6;
    AdamConfig adam;
    // Outer step keeps the best inner iterate (f never decreases) instead of the last one.
    bool keep_best_iterate = true;
    // Report the best zeta seen anywhere on the trajectory, not only at the end point.
    bool track_best_visited = true;

    void validate() const;
};

struct SirBlockRun {
    ChirpParams start;
    ChirpParams c;
    SirValue value;
    SirValue final_value;  // zeta at the converged point
    std::vector<double> surrogate_trace;  // f(c, z) after each outer iteration
    std::size_t outer_iters = 0;
    std::size_t adam_steps = 0;
    std::size_t evaluations = 0;  // channel evaluations (zeta, f or gradient taps)
    bool aborted = false;  // non-finite surrogate
};

struct SirOptResult {
    ChirpParams c;
    SirValue value;
    std::vector<SirBlockRun> blocks;
    std::size_t skipped_blocks = 0;
    std::size_t evaluations = 0;
};

/// Algorithm-2 descent from one starting point.
SirBlockRun run_sir_block(const SirObjective& obj, const ChirpParams& start,
                          const SirOptConfig& cfg);

/// All parameter blocks (centres of a B1 x B2 partition of the torus); best zeta wins,
/// ties broken by lexicographically smaller c.
SirOptResult optimize_sir(const SirObjective& obj, const SirOptConfig& cfg = {});

struct StaticSirResult {
    ChirpParams c;
    double mean_linear = 0.0;
    RVec per_realization_db;
};

/// Grid-searched fixed c maximising the ensemble mean of zeta (linear).
/// Grid points are (i/G1, j/G2).
StaticSirResult static_afdm_sir_baseline(const std::vector<SirObjective>& ensemble,
                                         std::size_t grid_c1 = 100, std::size_t grid_c2 = 100);

/// zeta (linear) over a G1 x G2 grid; row-major in c1.
RVec sir_grid(const SirObjective& obj, std::size_t grid_c1, std::size_t grid_c2);

}  // namespace agile_afdm
