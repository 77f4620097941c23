#include "agile_afdm/harness/stats.hpp"

#include <algorithm>
#include <cmath>

namespace agile_afdm::harness {

double mean(const RVec& v) {
    if (v.empty()) throw InvalidArgument("mean: empty sample");
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
}

double stddev(const RVec& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / double(v.size()));
}

double std_error(const RVec& v) {
    if (v.size() < 2) return 0.0;
    const double n = double(v.size());
    return stddev(v) * std::sqrt(n / (n - 1.0)) / std::sqrt(n);
}

double quantile(RVec v, double q) {
    if (v.empty()) throw InvalidArgument("quantile: empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile: q outside [0, 1]");
    std::sort(v.begin(), v.end());
    const double h = q * double(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - double(lo)) * (v[hi] - v[lo]);
}

Ccdf ccdf(const RVec& values, double step) {
    if (values.empty()) throw InvalidArgument("ccdf: empty sample");
    if (!(step > 0.0)) throw InvalidArgument("ccdf: step must be > 0");
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const double lo = std::floor(*mn);
    const auto count = static_cast<std::size_t>(std::ceil((std::ceil(*mx) - lo) / step)) + 2;
    return ccdf_on_grid(values, lo, step, count);
}

Ccdf ccdf_on_grid(const RVec& values, double lo, double step, std::size_t count) {
    if (values.empty()) throw InvalidArgument("ccdf: empty sample");
    if (!(step > 0.0)) throw InvalidArgument("ccdf: step must be > 0");
    RVec v = values;
    std::sort(v.begin(), v.end());
    Ccdf c;
    c.threshold.reserve(count);
    c.probability.reserve(count);
    std::size_t below = 0;  // values <= threshold
    for (std::size_t k = 0; k < count; ++k) {
        // integer multiples of the step keep the grid free of drift
        const double t = lo + double(k) * step;
        while (below < v.size() && v[below] <= t) ++below;
        c.threshold.push_back(t);
        c.probability.push_back(double(v.size() - below) / double(v.size()));
    }
    return c;
}

double ccdf_point(const Ccdf& c, double level) {
    for (std::size_t k = 0; k < c.threshold.size(); ++k) {
        if (c.probability[k] <= level) return c.threshold[k];
    }
    return c.threshold.back();
}

KsResult ks_two_sample(RVec a, RVec b) {
    if (a.empty() || b.empty()) throw InvalidArgument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = double(a.size()), nb = double(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(double(i) / na - double(j) / nb));
    }
    KsResult r;
    r.statistic = d;
    const double en = std::sqrt(na * nb / (na + nb));
    const double lambda = (en + 0.12 + 0.11 / en) * d;
    // Q_KS(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2)
    if (lambda < 1e-3) return r;
    double sum = 0.0, sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-12 * std::abs(sum)) break;
        sign = -sign;
    }
    r.p_value = std::clamp(2.0 * sum, 0.0, 1.0);
    return r;
}

}  // namespace agile_afdm::harness
