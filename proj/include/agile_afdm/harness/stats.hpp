// stats.hpp - summary statistics used by the experiment runner
#pragma once

#include "agile_afdm/types.hpp"

#include <cstddef>

namespace agile_afdm::harness {

double mean(const RVec& v);
/// Population standard deviation.
double stddev(const RVec& v);
/// Standard error of the mean (sample std / sqrt(n)).
double std_error(const RVec& v);

/// Linear interpolation between order statistics (type 7).  q in [0, 1].
double quantile(RVec v, double q);

struct Ccdf {
    RVec threshold;    // dB grid
    RVec probability;  // Pr(value > threshold)
};

/// CCDF on a uniform grid from floor(min) to ceil(max) + step.
Ccdf ccdf(const RVec& values, double step);
/// CCDF at thresholds lo + k * step, k = 0 .. count - 1.
Ccdf ccdf_on_grid(const RVec& values, double lo, double step, std::size_t count);

/// Smallest grid threshold with CCDF <= level (the "10^-3 point").
double ccdf_point(const Ccdf& c, double level);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;  // asymptotic Kolmogorov distribution
};

KsResult ks_two_sample(RVec a, RVec b);

}  // namespace agile_afdm::harness
