#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hedgelab/errors.hpp"
#include "hedgelab/gaussian.hpp"

namespace hedgelab::stats {

struct Moments {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double skewness = 0.0;  // m3 / m2^{3/2}
    double excess_kurtosis = 0.0;
    double std_error_mean = 0.0;
};

inline Moments moments(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n < 2) throw invalid_input("moments: need at least two samples");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    Moments out;
    out.n = n;
    out.mean = mean;
    out.variance = m2 * static_cast<double>(n) / static_cast<double>(n - 1);
    out.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    out.excess_kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
    out.std_error_mean = std::sqrt(out.variance / static_cast<double>(n));
    return out;
}

inline double correlation(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw invalid_input("correlation: need equal-length samples, at least two");
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw invalid_input("correlation: degenerate sample");
    return sxy / std::sqrt(sxx * syy);
}

/// Kolmogorov-Smirnov distance of the sample against the standard normal.
inline double ks_distance_normal(std::vector<double> x) {
    const std::size_t n = x.size();
    if (n == 0) throw invalid_input("ks_distance_normal: empty sample");
    std::sort(x.begin(), x.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double F = norm_cdf(x[i]);
        const double lo = F - static_cast<double>(i) / static_cast<double>(n);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n) - F;
        d = std::max(d, std::max(lo, hi));
    }
    return d;
}

/// Normal-theory half width of a (1-2q) confidence interval for a variance
/// ratio estimate var_hat/target: roughly z_q * sqrt(2/n) relative.
inline double variance_ratio_half_width(std::size_t n, double z = 2.5758293035489004) {
    if (n < 2) throw invalid_input("variance_ratio_half_width: need n >= 2");
    return z * std::sqrt(2.0 / static_cast<double>(n));
}

} // namespace hedgelab::stats
