#pragma once

// Reference implementations for the test suite, written independently of the
// library code paths they check: erf-based normal functions, an adaptive
// Simpson integrator, direct lognormal-expectation pricing, and a from-scratch
// Philox round. Slow and simple on purpose.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>

namespace oracle {

// erfc form keeps relative accuracy in the lower tail; 1 + erf cancels there.
inline double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double npdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::acos(-1.0));
}

inline double simpson_panel(const std::function<double(double)>& f, double a, double b) {
    return (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = simpson_panel(f, a, m);
    const double right = simpson_panel(f, m, b);
    if (depth <= 0) return left + right;
    if (std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    return adaptive_simpson_rec(f, a, b, simpson_panel(f, a, b), tol, 48);
}

/// Discounted lognormal expectation: e^{-R} E[f(S e^{R - Sigma/2 + sqrt(Sigma) Z})].
inline double lognormal_price(const std::function<double(double)>& f, double S, double R,
                              double Sigma, double tol = 1e-12) {
    if (Sigma == 0.0) return std::exp(-R) * f(S * std::exp(R));
    const double rt = std::sqrt(Sigma);
    const auto g = [&](double z) { return f(S * std::exp(R - 0.5 * Sigma + rt * z)) * npdf(z); };
    return std::exp(-R) * integrate(g, -14.0, 14.0, tol);
}

inline double bs_call(double S, double K, double R, double Sigma) {
    if (Sigma == 0.0) return std::exp(-R) * std::max(S * std::exp(R) - K, 0.0);
    const double rt = std::sqrt(Sigma);
    const double d1 = (std::log(S / K) + R + 0.5 * Sigma) / rt;
    return S * phi(d1) - K * std::exp(-R) * phi(d1 - rt);
}

inline double bs_put(double S, double K, double R, double Sigma) {
    // Put-call parity off the reference call.
    return bs_call(S, K, R, Sigma) - S + K * std::exp(-R);
}

/// Closed forms for the smooth catalog, each derived by hand from the
/// lognormal moment generating function.
inline double power_payoff_price(double p, double S, double R, double Sigma) {
    // e^{-R} E[(S e^{R - Sigma/2 + sqrt(Sigma) Z})^p] = S^p e^{(p-1)R + p(p-1)Sigma/2}
    return std::pow(S, p) * std::exp((p - 1.0) * R + 0.5 * p * (p - 1.0) * Sigma);
}

inline double log_contract_price(double S, double R, double Sigma) {
    // payoff -log(s): e^{-R}(-log S - R + Sigma/2)
    return std::exp(-R) * (-std::log(S) - R + 0.5 * Sigma);
}

inline double entropy_payoff_price(double S, double R, double Sigma) {
    // payoff s log(s): S (log S + R + Sigma/2)
    return S * (std::log(S) + R + 0.5 * Sigma);
}

/// Independent Philox4x32-10 written from the published algorithm, with the
/// multiply-hi/lo split done in 64-bit halves rather than one product.
inline void philox_reference(uint32_t ctr[4], const uint32_t key[2]) {
    uint32_t k0 = key[0], k1 = key[1];
    for (int round = 0; round < 10; ++round) {
        const uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
        const auto mulhilo = [](uint32_t a, uint32_t b, uint32_t& hi) {
            const uint64_t full =
                static_cast<uint64_t>(a) * static_cast<uint64_t>(b);
            hi = static_cast<uint32_t>(full >> 32);
            return static_cast<uint32_t>(full & 0xFFFFFFFFull);
        };
        uint32_t hi0, hi1;
        const uint32_t lo0 = mulhilo(m0, ctr[0], hi0);
        const uint32_t lo1 = mulhilo(m1, ctr[2], hi1);
        const uint32_t n0 = hi1 ^ ctr[1] ^ k0;
        const uint32_t n1 = lo1;
        const uint32_t n2 = hi0 ^ ctr[3] ^ k1;
        const uint32_t n3 = lo0;
        ctr[0] = n0;
        ctr[1] = n1;
        ctr[2] = n2;
        ctr[3] = n3;
        k0 += 0x9E3779B9u;
        k1 += 0xBB67AE85u;
    }
}

} // namespace oracle
