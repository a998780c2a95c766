#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "hedgelab/errors.hpp"
#include "hedgelab/rng.hpp"

namespace hedgelab {

/// Deterministic instantaneous volatility curve sigma(t).
struct SigmaSpec {
    enum class Shape { piecewise_constant, exp_decay };
    Shape shape = Shape::piecewise_constant;

    // piecewise_constant: sigma(t) = values[k] on [times[k], times[k+1]),
    // last value extends to infinity; times[0] must be 0.
    std::vector<double> times;
    std::vector<double> values;

    // exp_decay on the variance: sigma^2(t) = theta + (v0 - theta) e^{-speed t}.
    double v0 = 0.0;
    double theta = 0.0;
    double speed = 0.0;

    static SigmaSpec piecewise_constant(std::vector<double> times, std::vector<double> values) {
        SigmaSpec s;
        s.shape = Shape::piecewise_constant;
        s.times = std::move(times);
        s.values = std::move(values);
        s.validate();
        return s;
    }

    static SigmaSpec exp_decay(double v0, double theta, double speed) {
        SigmaSpec s;
        s.shape = Shape::exp_decay;
        s.v0 = v0;
        s.theta = theta;
        s.speed = speed;
        s.validate();
        return s;
    }

    void validate() const {
        if (shape == Shape::piecewise_constant) {
            if (times.empty() || times.size() != values.size())
                throw invalid_input("sigma spec: times and values must be nonempty and equal length");
            if (times.front() != 0.0) throw invalid_input("sigma spec: times must start at 0");
            for (std::size_t k = 0; k + 1 < times.size(); ++k)
                if (!(times[k] < times[k + 1]))
                    throw invalid_input("sigma spec: times must be strictly increasing");
            for (double v : values)
                if (!(v > 0.0)) throw invalid_input("sigma spec: volatilities must be positive");
        } else {
            if (!(v0 > 0.0) || !(theta > 0.0) || !(speed >= 0.0))
                throw invalid_input("sigma spec: exp_decay needs v0 > 0, theta > 0, speed >= 0");
        }
    }

    double variance_at(double t) const {
        if (shape == Shape::exp_decay) return theta + (v0 - theta) * std::exp(-speed * t);
        std::size_t k = 0;
        while (k + 1 < times.size() && t >= times[k + 1]) ++k;
        return values[k] * values[k];
    }
};

struct StochVolParams {
    double v0 = 0.04;          // initial instantaneous variance
    double speed = 1.0;        // mean-reversion speed
    double long_run_var = 0.04;
    double vol_of_vol = 0.0;
    double rho = 0.0;          // price/variance shock correlation

    void validate() const {
        if (!(v0 > 0.0) || !(long_run_var > 0.0) || !(speed >= 0.0) || !(vol_of_vol >= 0.0))
            throw invalid_input("stoch vol: need v0 > 0, long_run_var > 0, speed >= 0, vol_of_vol >= 0");
        if (!(rho >= -1.0 && rho <= 1.0)) throw invalid_input("stoch vol: rho must lie in [-1, 1]");
    }
};

struct ModelSpec {
    enum class Variant { black_scholes, time_dependent, stoch_vol };
    Variant variant = Variant::black_scholes;
    double s1_init = 100.0;
    double r = 0.0;
    double sigma = 0.2;   // black_scholes
    SigmaSpec curve;      // time_dependent
    StochVolParams sv;    // stoch_vol

    static ModelSpec black_scholes(double sigma, double r, double s1_init) {
        ModelSpec m;
        m.variant = Variant::black_scholes;
        m.sigma = sigma;
        m.r = r;
        m.s1_init = s1_init;
        m.validate();
        return m;
    }

    static ModelSpec time_dependent(SigmaSpec curve, double r, double s1_init) {
        ModelSpec m;
        m.variant = Variant::time_dependent;
        m.curve = std::move(curve);
        m.r = r;
        m.s1_init = s1_init;
        m.validate();
        return m;
    }

    static ModelSpec stoch_vol(StochVolParams sv, double r, double s1_init) {
        ModelSpec m;
        m.variant = Variant::stoch_vol;
        m.sv = sv;
        m.r = r;
        m.s1_init = s1_init;
        m.validate();
        return m;
    }

    void validate() const {
        if (!(s1_init > 0.0)) throw invalid_input("model: s1_init must be positive");
        if (!std::isfinite(r)) throw invalid_input("model: r must be finite");
        switch (variant) {
            case Variant::black_scholes:
                if (!(sigma > 0.0)) throw invalid_input("model: sigma must be positive");
                break;
            case Variant::time_dependent: curve.validate(); break;
            case Variant::stoch_vol: sv.validate(); break;
        }
    }
};

/// One simulated path on a fixed grid, in both market and discounted
/// coordinates. s0 is the bond account normalized to s0(T) = 1, so
/// s_tilde = s1 / s0 and qv accumulates the quadratic variation of
/// log(s_tilde) with the left-point rule qv_{i+1} = qv_i + v(t_i) dt.
struct PathGrid {
    std::vector<double> times;
    std::vector<double> s1;
    std::vector<double> s0;
    std::vector<double> s_tilde;
    std::vector<double> log_stilde;
    std::vector<double> qv;
    double horizon = 0.0;
    double rate = 0.0;
    std::uint64_t seed = 0;

    std::size_t n_steps() const { return times.empty() ? 0 : times.size() - 1; }
};

namespace detail {

inline void set_market_columns(PathGrid& g, std::size_t i) {
    const double st = std::exp(g.log_stilde[i]);
    g.s1[i] = st * g.s0[i];
    g.s_tilde[i] = g.s1[i] / g.s0[i]; // re-derived so the ratio holds exactly
}

} // namespace detail

/// Simulate on the uniform grid t_i = i * horizon / steps with exact
/// log-normal stepping per interval: the left-point variance that enters qv
/// also drives the increment of log(s_tilde).
inline PathGrid simulate_path(const ModelSpec& model, double horizon, std::size_t steps,
                              std::uint64_t seed) {
    model.validate();
    if (!(horizon > 0.0)) throw invalid_input("simulate_path: horizon must be positive");
    if (steps == 0) throw invalid_input("simulate_path: steps must be positive");

    PathGrid g;
    g.horizon = horizon;
    g.rate = model.r;
    g.seed = seed;
    const std::size_t n = steps;
    g.times.resize(n + 1);
    g.s1.resize(n + 1);
    g.s0.resize(n + 1);
    g.s_tilde.resize(n + 1);
    g.log_stilde.resize(n + 1);
    g.qv.resize(n + 1);

    const double dt = horizon / static_cast<double>(n);
    for (std::size_t i = 0; i <= n; ++i) {
        g.times[i] = dt * static_cast<double>(i);
        g.s0[i] = std::exp(-model.r * (horizon - g.times[i]));
    }
    g.times[n] = horizon;
    g.s0[n] = 1.0;

    PathRng rng(seed);
    g.log_stilde[0] = std::log(model.s1_init) + model.r * horizon;
    g.qv[0] = 0.0;
    detail::set_market_columns(g, 0);

    const bool is_sv = model.variant == ModelSpec::Variant::stoch_vol;
    double v_state = is_sv ? model.sv.v0 : 0.0;
    const double decay = is_sv ? std::exp(-model.sv.speed * dt) : 0.0;

    for (std::size_t i = 0; i < n; ++i) {
        double v;
        double z1;
        if (is_sv) {
            double z2;
            rng.normal_pair(static_cast<std::uint64_t>(i), z1, z2);
            const double vp = std::max(v_state, 0.0); // full truncation
            v = vp;
            const StochVolParams& p = model.sv;
            v_state = p.long_run_var + (vp - p.long_run_var) * decay +
                      p.vol_of_vol * std::sqrt(vp * dt) *
                          (p.rho * z1 + std::sqrt(1.0 - p.rho * p.rho) * z2);
        } else {
            z1 = rng.normal(static_cast<std::uint64_t>(i), 0);
            v = model.variant == ModelSpec::Variant::black_scholes
                    ? model.sigma * model.sigma
                    : model.curve.variance_at(g.times[i]);
        }
        g.log_stilde[i + 1] = g.log_stilde[i] - 0.5 * v * dt + std::sqrt(v * dt) * z1;
        g.qv[i + 1] = g.qv[i] + v * dt;
        detail::set_market_columns(g, i + 1);
    }
    return g;
}

/// Refine a simulated path in distribution: Brownian-bridge insertion of
/// factor-1 interior points per coarse interval, holding the coarse grid's
/// values fixed bit for bit. Only models with a deterministic variance curve
/// can be refined consistently; each coarse interval keeps its own left-point
/// variance for both the bridge and the qv fill-in.
inline PathGrid refine_grid(const ModelSpec& model, const PathGrid& coarse, std::size_t factor,
                            std::uint64_t seed) {
    model.validate();
    if (model.variant == ModelSpec::Variant::stoch_vol)
        throw invalid_input("refine_grid: stochastic-volatility paths cannot be refined "
                            "(variance path is not deterministic)");
    if (factor == 0) throw invalid_input("refine_grid: factor must be positive");
    const std::size_t n = coarse.n_steps();
    if (n == 0) throw invalid_input("refine_grid: path has no steps");
    if (factor == 1) return coarse;

    PathGrid g;
    g.horizon = coarse.horizon;
    g.rate = coarse.rate;
    g.seed = coarse.seed;
    const std::size_t nf = n * factor;
    g.times.resize(nf + 1);
    g.s1.resize(nf + 1);
    g.s0.resize(nf + 1);
    g.s_tilde.resize(nf + 1);
    g.log_stilde.resize(nf + 1);
    g.qv.resize(nf + 1);

    PathRng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = coarse.times[i], b = coarse.times[i + 1];
        const double dt_c = b - a;
        const double v = (coarse.qv[i + 1] - coarse.qv[i]) / dt_c; // left-point variance
        const double y = coarse.log_stilde[i + 1];

        // coarse point copied verbatim
        const std::size_t base = i * factor;
        g.times[base] = coarse.times[i];
        g.s0[base] = coarse.s0[i];
        g.s1[base] = coarse.s1[i];
        g.s_tilde[base] = coarse.s_tilde[i];
        g.log_stilde[base] = coarse.log_stilde[i];
        g.qv[base] = coarse.qv[i];

        double a_cur = a;
        double x_cur = coarse.log_stilde[i];
        for (std::size_t k = 1; k < factor; ++k) {
            const std::size_t idx = base + k;
            const double c = a + dt_c * static_cast<double>(k) / static_cast<double>(factor);
            const double w = (c - a_cur) / (b - a_cur);
            const double mean = x_cur + (y - x_cur) * w;
            const double var = v * (c - a_cur) * (b - c) / (b - a_cur);
            const double z = rng.normal(static_cast<std::uint64_t>(idx), 2);
            x_cur = mean + std::sqrt(var) * z;
            a_cur = c;
            g.times[idx] = c;
            g.s0[idx] = std::exp(-coarse.rate * (coarse.horizon - c));
            g.log_stilde[idx] = x_cur;
            g.qv[idx] = coarse.qv[i] + v * (c - a);
            detail::set_market_columns(g, idx);
        }
    }
    g.times[nf] = coarse.times[n];
    g.s0[nf] = coarse.s0[n];
    g.s1[nf] = coarse.s1[n];
    g.s_tilde[nf] = coarse.s_tilde[n];
    g.log_stilde[nf] = coarse.log_stilde[n];
    g.qv[nf] = coarse.qv[n];
    return g;
}

} // namespace hedgelab
