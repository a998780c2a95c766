#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "hedgelab/errors.hpp"
#include "hedgelab/gaussian.hpp"

namespace hedgelab::quad {

struct NodesWeights {
    std::vector<double> x;
    std::vector<double> w;
};

namespace detail {

// Eigenvalues of a symmetric tridiagonal matrix by the implicit-shift QL
// algorithm. d holds the diagonal and is overwritten with the (unsorted)
// eigenvalues; e holds the subdiagonal in e[0..n-2] and is destroyed.
inline void tridiagonal_eigenvalues(std::vector<double>& d, std::vector<double>& e) {
    const int n = static_cast<int>(d.size());
    const double eps = 2.220446049250313e-16;
    e.resize(n);
    e[n - 1] = 0.0;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m = 0;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == 50) throw numeric_failure("gauss_hermite: eigenvalue iteration failed");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i = m - 1;
                for (; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) { // deflate: a negligible subdiagonal split off
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

// Gauss-Hermite rule for weight e^{-x^2}. Nodes are seeded from the
// eigenvalues of the Jacobi matrix (zero diagonal, subdiagonal sqrt(j/2))
// and polished by Newton on the orthonormal recurrence, which also yields
// the weights. Closed-form seed ladders are avoided on purpose: they drift
// onto the wrong root once the order reaches a few hundred.
inline NodesWeights compute_hermite(int n) {
    if (n < 1) throw invalid_input("gauss_hermite: order must be >= 1");
    std::vector<double> diag(n, 0.0), sub(n, 0.0);
    for (int j = 1; j < n; ++j) sub[j - 1] = std::sqrt(0.5 * j);
    tridiagonal_eigenvalues(diag, sub);
    std::sort(diag.begin(), diag.end()); // ascending: diag[n-1] is the largest root
    NodesWeights nw;
    nw.x.resize(n);
    nw.w.resize(n);
    const double eps = 1e-14;
    const double pim4 = 0.7511255444649425; // pi^{-1/4}
    const int m = (n + 1) / 2;
    double z = 0.0, pp = 0.0;
    for (int i = 0; i < m; ++i) {
        // Odd-n middle root is exactly zero by symmetry.
        z = (2 * i == n - 1) ? 0.0 : diag[n - 1 - i];
        bool converged = false;
        for (int its = 0; its < 100; ++its) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(j / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::fabs(dz) <= eps) {
                converged = true;
                break;
            }
        }
        if (!converged) throw numeric_failure("gauss_hermite: root iteration failed");
        if (i > 0 && !(z < nw.x[i - 1] - 1e-12))
            throw numeric_failure("gauss_hermite: roots failed to stay distinct");
        nw.x[n - 1 - i] = -z;
        nw.x[i] = z;
        nw.w[i] = 2.0 / (pp * pp);
        nw.w[n - 1 - i] = nw.w[i];
    }
    return nw;
}

// Gauss-Legendre rule on [-1, 1].
inline NodesWeights compute_legendre(int n) {
    if (n < 1) throw invalid_input("gauss_legendre: order must be >= 1");
    NodesWeights nw;
    nw.x.resize(n);
    nw.w.resize(n);
    const double eps = 1e-14;
    const double pi = 3.141592653589793;
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        bool converged = false;
        for (int its = 0; its < 100; ++its) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / pp;
            z -= dz;
            if (std::fabs(dz) <= eps) {
                converged = true;
                break;
            }
        }
        if (!converged) throw numeric_failure("gauss_legendre: root iteration failed");
        nw.x[i] = -z;
        nw.x[n - 1 - i] = z;
        nw.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        nw.w[n - 1 - i] = nw.w[i];
    }
    return nw;
}

template <NodesWeights (*Compute)(int)>
inline const NodesWeights& cached_rule(int n) {
    static std::map<int, NodesWeights> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, Compute(n)).first;
    return it->second;
}

} // namespace detail

inline const NodesWeights& hermite_rule(int n) { return detail::cached_rule<detail::compute_hermite>(n); }
inline const NodesWeights& legendre_rule(int n) { return detail::cached_rule<detail::compute_legendre>(n); }

/// E[f(Z)] for standard normal Z, by Gauss-Hermite (substitution z = sqrt(2) u).
template <class F>
double hermite_expectation(F&& f, int order) {
    const NodesWeights& nw = hermite_rule(order);
    const double inv_sqrt_pi = 0.5641895835477563;
    double acc = 0.0;
    for (std::size_t i = 0; i < nw.x.size(); ++i) acc += nw.w[i] * f(sqrt_2 * nw.x[i]);
    return inv_sqrt_pi * acc;
}

/// integral_a^b f(z) phi(z) dz by Gauss-Legendre.
template <class F>
double legendre_phi_integral(F&& f, double a, double b, int order) {
    const NodesWeights& nw = legendre_rule(order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < nw.x.size(); ++i) {
        const double z = mid + half * nw.x[i];
        acc += nw.w[i] * f(z) * norm_pdf(z);
    }
    return half * acc;
}

/// E[f(Z)] restricted to [-z_max, z_max], split at interior cut points so each
/// panel is smooth. cuts must be sorted; entries outside the window are
/// ignored.
template <class F>
double split_expectation(F&& f, const std::vector<double>& cuts, double z_max, int order) {
    double acc = 0.0;
    double lo = -z_max;
    for (double c : cuts) {
        if (c <= lo) continue;
        if (c >= z_max) break;
        acc += legendre_phi_integral(f, lo, c, order);
        lo = c;
    }
    acc += legendre_phi_integral(f, lo, z_max, order);
    return acc;
}

struct QuadratureConfig {
    int hermite_order = 200; // order for smooth integrands over the whole line
    int legendre_order = 48; // per-panel order for kink-split integration
    double z_max = 12.0;     // truncation for the split rule
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
};

/// Evaluate eval(order) at increasing orders until two successive results
/// agree within tolerance; one escalation, then numeric_failure.
template <class Eval>
double with_order_check(Eval&& eval, int base_order, double abs_tol, double rel_tol,
                        const char* what) {
    const auto close = [&](double a, double b) {
        return std::fabs(a - b) <= abs_tol + rel_tol * std::max(std::fabs(a), std::fabs(b));
    };
    double v1 = eval(base_order / 2);
    double v2 = eval(base_order);
    if (close(v1, v2)) return v2;
    const double v3 = eval(2 * base_order);
    if (close(v2, v3)) return v3;
    throw numeric_failure(std::string("quadrature did not converge: ") + what);
}

} // namespace hedgelab::quad
