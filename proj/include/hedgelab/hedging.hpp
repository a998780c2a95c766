#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "hedgelab/errors.hpp"
#include "hedgelab/gaussian.hpp"
#include "hedgelab/market.hpp"
#include "hedgelab/payoff.hpp"
#include "hedgelab/pricing.hpp"

namespace hedgelab {

enum class StrategyKind { continuous, hitting_time, leland };

/// Parameters of a hedging run. sigma_hat_sq is the variance budget; alpha
/// controls the variance enlargement (convex payoffs price at (1 + 2/alpha),
/// concave at (1 - 2/alpha), which forces alpha > 2 on the concave side);
/// kappa is the proportional cost rate. leland_n is the partition size of the
/// equidistant strategy.
struct StrategyConfig {
    StrategyKind kind = StrategyKind::hitting_time;
    double sigma_hat_sq = 0.0;
    double alpha = 2.0;
    double kappa = 0.0;
    bool charge_switch_cost = true;   // charge the trade that moves to (a, b) at tau
    std::size_t resolution_floor = 20; // min mean grid steps per rebalance before alarm
    std::size_t leland_n = 0;

    void validate(const Payoff& payoff) const {
        if (!(sigma_hat_sq > 0.0) && kind != StrategyKind::leland)
            throw invalid_input("strategy: sigma_hat_sq must be positive");
        if (!(kappa >= 0.0) || !std::isfinite(kappa))
            throw invalid_input("strategy: kappa must be nonnegative");
        if (kind == StrategyKind::hitting_time) {
            if (!(kappa > 0.0)) throw invalid_input("strategy: hitting_time requires kappa > 0");
            if (!(alpha > 0.0)) throw invalid_input("strategy: alpha must be positive");
            if (payoff.convexity() == Convexity::concave && !(alpha > 2.0))
                throw invalid_input("strategy: concave payoffs require alpha > 2 "
                                    "(shrunk variance must stay positive)");
        }
        if (kind == StrategyKind::leland && leland_n < 1)
            throw invalid_input("strategy: leland requires a partition size n >= 1");
    }

    /// (1 + 2/alpha) for convex payoffs, (1 - 2/alpha) for concave.
    double variance_factor(const Payoff& payoff) const {
        return payoff.convexity() == Convexity::convex ? 1.0 + 2.0 / alpha : 1.0 - 2.0 / alpha;
    }
};

/// Full ledger of one hedging run.
///
/// rebalance_times logs every executed trade: the setup at t = 0, the
/// trigger/date trades, and the switch to the buy-and-hold pair at tau.
/// n_rebalances counts only the post-setup trigger/date trades, which is the
/// N entering the count asymptotics. value_path holds V_t = pi S1 + pi0 S0 in
/// cash terms and vtilde_path its discounted companion. z_path is
/// kappa^{-1} (P(s_tilde, 0, Sigma_adj) - Vtilde); for a costless run
/// (kappa = 0) it holds the raw gap P - Vtilde instead. Costs are reported
/// both as charged in cash at the trade dates (total_cost_paid) and in
/// discounted units (total_cost_paid_discounted).
struct HedgeOutcome {
    std::vector<double> rebalance_times;
    std::size_t n_rebalances = 0;
    std::vector<double> value_path;
    std::vector<double> vtilde_path;
    std::vector<double> z_path;
    double terminal_shortfall = 0.0; // f(S1_T) - V_T, clearance cost ignored
    double initial_price_charged = 0.0;
    double total_cost_paid = 0.0;
    double total_cost_paid_discounted = 0.0;
    bool switched = false;       // tau reached and holdings frozen at (a, b)
    double switch_time = std::numeric_limits<double>::quiet_NaN();
    bool grid_alarm = false;     // hitting times under-resolved on this grid
    double mean_steps_per_rebalance = std::numeric_limits<double>::infinity();
};

namespace detail {

/// Price/delta/gamma in the discounted chart (R = 0), dispatched once per
/// payoff so the per-step loop avoids re-classifying. Smooth payoffs go
/// through quadrature and are orders of magnitude slower; fine for analysis,
/// not for large studies.
class DiscountedPricer {
public:
    explicit DiscountedPricer(const Payoff& payoff) : f_(&payoff) {
        if (payoff.is_vanilla()) {
            route_ = payoff.kind() == Payoff::Kind::call ? Route::call : Route::put;
            k_ = payoff.strike();
            logk_ = std::log(k_);
        } else if (payoff.kind() == Payoff::Kind::piecewise_linear) {
            route_ = Route::pl;
        } else {
            route_ = Route::quad;
        }
    }

    double price(double s, double sigma) const {
        if (sigma <= 0.0) return (*f_)(s);
        switch (route_) {
            case Route::call: {
                const double rt = std::sqrt(sigma);
                const double d1 = (std::log(s) - logk_ + 0.5 * sigma) / rt;
                return s * norm_cdf(d1) - k_ * norm_cdf(d1 - rt);
            }
            case Route::put: {
                const double rt = std::sqrt(sigma);
                const double d1 = (std::log(s) - logk_ + 0.5 * sigma) / rt;
                return k_ * norm_cdf(-(d1 - rt)) - s * norm_cdf(-d1);
            }
            case Route::pl:
                return closed_form_greeks(*f_, {s, 0.0, sigma}).price;
            case Route::quad:
                return quadrature_price(*f_, {s, 0.0, sigma});
        }
        return 0.0;
    }

    double delta(double s, double sigma) const {
        switch (route_) {
            case Route::call:
                return norm_cdf(d1(s, sigma));
            case Route::put:
                return norm_cdf(d1(s, sigma)) - 1.0;
            case Route::pl:
                return closed_form_greeks(*f_, {s, 0.0, sigma}).dP_dS;
            case Route::quad: {
                const double disc = quad_expect(
                    [&](double x) { return f_->derivative_mid(x) * x; }, s, sigma);
                return disc / s;
            }
        }
        return 0.0;
    }

    void delta_gamma(double s, double sigma, double& d, double& g) const {
        switch (route_) {
            case Route::call:
            case Route::put: {
                const double rt = std::sqrt(sigma);
                const double x1 = (std::log(s) - logk_ + 0.5 * sigma) / rt;
                d = route_ == Route::call ? norm_cdf(x1) : norm_cdf(x1) - 1.0;
                g = norm_pdf(x1) / (s * rt);
                return;
            }
            default: {
                const GreekSet gs = route_ == Route::pl
                                        ? closed_form_greeks(*f_, {s, 0.0, sigma})
                                        : quadrature_greeks(*f_, {s, 0.0, sigma});
                d = gs.dP_dS;
                g = gs.d2P_dS2;
                return;
            }
        }
    }

    double gamma(double s, double sigma) const {
        double d, g;
        delta_gamma(s, sigma, d, g);
        return g;
    }

    bool is_vanilla() const { return route_ == Route::call || route_ == Route::put; }
    bool is_call() const { return route_ == Route::call; }
    double log_strike() const { return logk_; }

    double d1(double s, double sigma) const {
        return (std::log(s) - logk_ + 0.5 * sigma) / std::sqrt(sigma);
    }

private:
    enum class Route { call, put, pl, quad };

    template <class F>
    double quad_expect(F&& integrand, double s, double sigma) const {
        const double rt = std::sqrt(sigma);
        const auto cuts = kink_images(*f_, s, sigma);
        const auto x_of = [&](double z) { return s * std::exp(rt * z - 0.5 * sigma); };
        return expectation(
            *f_, cuts, [&](double z) { return integrand(x_of(z)); }, quad::QuadratureConfig{},
            "delta");
    }

    const Payoff* f_;
    Route route_ = Route::call;
    double k_ = 0.0;
    double logk_ = 0.0;
};

struct LedgerState {
    double pi = 0.0;       // units of S1
    double pi0 = 0.0;      // units of S0 (discounted bond account)
    double cost_disc = 0.0;
    double cost_cash = 0.0;

    double vtilde(double s_tilde) const { return pi * s_tilde + pi0; }

    /// Self-financing trade to new equity holding; the bond account absorbs
    /// the traded notional and the proportional cost.
    void trade_to(double pi_new, double s_tilde, double s0, double kappa) {
        const double dpi = pi_new - pi;
        const double cost = kappa * std::fabs(dpi) * s_tilde;
        pi0 -= dpi * s_tilde + cost;
        pi = pi_new;
        cost_disc += cost;
        cost_cash += cost * s0;
    }
};

inline void check_path(const PathGrid& path) {
    if (path.n_steps() == 0) throw invalid_input("hedge engine: path has no steps");
}

inline void require_condition_one(const Payoff& payoff) {
    if (!payoff.has_nonvanishing_gamma())
        throw gamma_condition_violation(
            "payoff has identically vanishing gamma; hedging triggers are undefined");
}

} // namespace detail

/// Conservative delta hedge in the continuous-trading approximation:
/// costless rebalancing at every grid point with remaining variance
/// Sigma_hat - qv_t, switching to the support line (a, b) once the budget is
/// exhausted.
inline HedgeOutcome run_continuous(const PathGrid& path, const Payoff& payoff,
                                   double sigma_hat_sq) {
    detail::check_path(path);
    detail::require_condition_one(payoff);
    if (!(sigma_hat_sq > 0.0)) throw invalid_input("run_continuous: sigma_hat_sq must be positive");

    const detail::DiscountedPricer pricer(payoff);
    const std::size_t n = path.n_steps();
    HedgeOutcome out;
    out.value_path.resize(n + 1);
    out.vtilde_path.resize(n + 1);
    out.z_path.resize(n + 1);
    out.rebalance_times.reserve(n + 1);

    detail::LedgerState led;
    const double p0 = pricer.price(path.s_tilde[0], sigma_hat_sq);
    led.pi = pricer.delta(path.s_tilde[0], sigma_hat_sq);
    led.pi0 = p0 - led.pi * path.s_tilde[0];
    out.initial_price_charged = path.s0[0] * p0;
    out.rebalance_times.push_back(path.times[0]);
    out.vtilde_path[0] = p0;
    out.value_path[0] = path.s0[0] * p0;
    out.z_path[0] = 0.0;

    bool frozen = false;
    for (std::size_t i = 1; i <= n; ++i) {
        const double s = path.s_tilde[i];
        const double remaining = sigma_hat_sq - path.qv[i];
        if (!frozen) {
            if (path.qv[i] >= sigma_hat_sq) {
                led.trade_to(payoff.kink_selection(s).first, s, path.s0[i], 0.0);
                frozen = true;
                out.switched = true;
                out.switch_time = path.times[i];
                out.rebalance_times.push_back(path.times[i]);
            } else {
                led.trade_to(pricer.delta(s, remaining), s, path.s0[i], 0.0);
                ++out.n_rebalances;
                out.rebalance_times.push_back(path.times[i]);
            }
        }
        const double vt = led.vtilde(s);
        out.vtilde_path[i] = vt;
        out.value_path[i] = path.s0[i] * vt;
        out.z_path[i] = pricer.price(s, std::max(remaining, 0.0)) - vt; // raw gap, kappa = 0
    }
    out.terminal_shortfall = payoff(path.s1[n]) - out.value_path[n];
    return out;
}

/// Hitting-time strategy: rebalance at the first grid time where the adjusted
/// delta has moved by alpha kappa s_tilde |Gamma| since the last trade, price
/// and hedge at the enlarged/shrunk variance (1 +- 2/alpha)(Sigma_hat - qv),
/// and switch to the support line once the variance budget is exhausted.
inline HedgeOutcome run_hitting_time(const PathGrid& path, const Payoff& payoff,
                                     const StrategyConfig& cfg) {
    detail::check_path(path);
    detail::require_condition_one(payoff);
    StrategyConfig c = cfg;
    c.kind = StrategyKind::hitting_time;
    c.validate(payoff);

    const detail::DiscountedPricer pricer(payoff);
    const double ctil = c.variance_factor(payoff);
    const double kappa = c.kappa;
    const std::size_t n = path.n_steps();

    HedgeOutcome out;
    out.value_path.resize(n + 1);
    out.vtilde_path.resize(n + 1);
    out.z_path.resize(n + 1);

    // The vanilla route derives everything from d1 built on the path's own
    // log_stilde column, so trigger bounds, executed deltas, and anchor gammas
    // stay mutually consistent to the last bit.
    const bool vanilla = pricer.is_vanilla();
    const auto vanilla_d1 = [&](std::size_t i, double sig) {
        return (path.log_stilde[i] - pricer.log_strike() + 0.5 * sig) / std::sqrt(sig);
    };

    const double s0t = path.s_tilde[0];
    const double sig0 = ctil * c.sigma_hat_sq;
    double pi_anchor, gamma_anchor;
    if (vanilla) {
        const double d1_0 = vanilla_d1(0, sig0);
        pi_anchor = pricer.is_call() ? norm_cdf(d1_0) : norm_cdf(d1_0) - 1.0;
        gamma_anchor = norm_pdf(d1_0) / (s0t * std::sqrt(sig0));
    } else {
        pricer.delta_gamma(s0t, sig0, pi_anchor, gamma_anchor);
    }
    double threshold = c.alpha * kappa * s0t * std::fabs(gamma_anchor);

    const double p0 = pricer.price(s0t, sig0);
    detail::LedgerState led;
    led.pi = pi_anchor;
    led.pi0 = p0 - pi_anchor * s0t; // premium absorbed the setup cost
    led.cost_disc = kappa * std::fabs(pi_anchor) * s0t;
    led.cost_cash = led.cost_disc * path.s0[0];
    out.initial_price_charged = path.s0[0] * p0 + kappa * std::fabs(pi_anchor) * path.s1[0];
    out.rebalance_times.push_back(path.times[0]);
    out.vtilde_path[0] = p0;
    out.value_path[0] = path.s0[0] * p0;
    out.z_path[0] = 0.0;

    // Vanilla fast path: the trigger |Phi(d1) - Phi(d1_anchor)| >= h is a pair
    // of bounds on d1 itself, so the per-step work is a multiply-add and two
    // compares instead of a cdf evaluation.
    double d1_lo = 0.0, d1_hi = 0.0;
    const auto set_vanilla_bounds = [&](double d1_a) {
        const double u_anchor = norm_cdf(d1_a);
        const double up = u_anchor + threshold;
        const double dn = u_anchor - threshold;
        d1_hi = up < 1.0 ? norm_cdf_inv(up) : std::numeric_limits<double>::infinity();
        d1_lo = dn > 0.0 ? norm_cdf_inv(dn) : -std::numeric_limits<double>::infinity();
    };
    if (vanilla) set_vanilla_bounds(vanilla_d1(0, sig0));

    bool frozen = false;
    std::size_t freeze_index = n;
    for (std::size_t i = 1; i <= n; ++i) {
        const double s = path.s_tilde[i];
        const double remaining = c.sigma_hat_sq - path.qv[i];
        if (!frozen) {
            if (path.qv[i] >= c.sigma_hat_sq) {
                const double a = payoff.kink_selection(s).first;
                led.trade_to(a, s, path.s0[i], c.charge_switch_cost ? kappa : 0.0);
                frozen = true;
                freeze_index = i;
                out.switched = true;
                out.switch_time = path.times[i];
                out.rebalance_times.push_back(path.times[i]);
            } else {
                const double sig = ctil * remaining;
                bool hit;
                double pi_new = 0.0;
                double d1 = 0.0;
                if (vanilla) {
                    d1 = vanilla_d1(i, sig);
                    hit = d1 >= d1_hi || d1 <= d1_lo;
                    if (hit) pi_new = pricer.is_call() ? norm_cdf(d1) : norm_cdf(d1) - 1.0;
                } else {
                    pi_new = pricer.delta(s, sig);
                    hit = std::fabs(pi_new - pi_anchor) >= threshold;
                }
                if (hit) {
                    led.trade_to(pi_new, s, path.s0[i], kappa);
                    pi_anchor = pi_new;
                    gamma_anchor = vanilla ? norm_pdf(d1) / (s * std::sqrt(sig))
                                           : pricer.gamma(s, sig);
                    threshold = c.alpha * kappa * s * std::fabs(gamma_anchor);
                    if (vanilla) set_vanilla_bounds(d1);
                    ++out.n_rebalances;
                    out.rebalance_times.push_back(path.times[i]);
                }
            }
        }
        const double vt = led.vtilde(s);
        out.vtilde_path[i] = vt;
        out.value_path[i] = path.s0[i] * vt;
        out.z_path[i] = (pricer.price(s, ctil * std::max(remaining, 0.0)) - vt) / kappa;
    }
    out.terminal_shortfall = payoff(path.s1[n]) - out.value_path[n];
    out.total_cost_paid = led.cost_cash;
    out.total_cost_paid_discounted = led.cost_disc;
    if (out.n_rebalances > 0) {
        out.mean_steps_per_rebalance =
            static_cast<double>(freeze_index) / static_cast<double>(out.n_rebalances);
        out.grid_alarm = out.mean_steps_per_rebalance <
                         static_cast<double>(c.resolution_floor);
    }
    return out;
}

/// Equidistant strategy with enlarged variance
/// sigma_check_sq = sigma^2 + sigma sqrt(n) kappa sqrt(8/pi): trade at
/// t_j = j/n, j = 0..n-1, hedging at remaining variance sigma_check_sq (1-t).
/// Restricted to r = 0 and horizon 1, where the enlargement formula lives.
inline HedgeOutcome run_leland(const PathGrid& path, const Payoff& payoff, double sigma,
                               double kappa, std::size_t n_dates) {
    detail::check_path(path);
    detail::require_condition_one(payoff);
    if (payoff.convexity() != Convexity::convex)
        throw invalid_input("run_leland: payoff must be convex");
    if (!(sigma > 0.0)) throw invalid_input("run_leland: sigma must be positive");
    if (!(kappa >= 0.0)) throw invalid_input("run_leland: kappa must be nonnegative");
    if (n_dates < 1) throw invalid_input("run_leland: need at least one trade date");
    if (path.rate != 0.0) throw invalid_input("run_leland: requires r = 0");
    if (path.horizon != 1.0) throw invalid_input("run_leland: requires horizon 1");
    const std::size_t n = path.n_steps();
    if (n % n_dates != 0)
        throw invalid_input("run_leland: grid steps must be a multiple of the partition size");

    const double sqrt_8_pi = 1.5957691216057308; // sqrt(8/pi)
    const double sig_check_sq =
        sigma * sigma + sigma * std::sqrt(static_cast<double>(n_dates)) * kappa * sqrt_8_pi;
    const detail::DiscountedPricer pricer(payoff);
    const std::size_t stride = n / n_dates;

    HedgeOutcome out;
    out.value_path.resize(n + 1);
    out.vtilde_path.resize(n + 1);
    out.z_path.resize(n + 1);
    out.rebalance_times.reserve(n_dates);

    const double p0 = pricer.price(path.s_tilde[0], sig_check_sq);
    detail::LedgerState led;
    led.pi = pricer.delta(path.s_tilde[0], sig_check_sq);
    led.pi0 = p0 - led.pi * path.s_tilde[0];
    led.cost_disc = kappa * std::fabs(led.pi) * path.s_tilde[0];
    led.cost_cash = led.cost_disc * path.s0[0];
    out.initial_price_charged = path.s0[0] * p0 + kappa * std::fabs(led.pi) * path.s1[0];
    out.rebalance_times.push_back(path.times[0]);
    out.vtilde_path[0] = p0;
    out.value_path[0] = path.s0[0] * p0;
    out.z_path[0] = 0.0;

    for (std::size_t i = 1; i <= n; ++i) {
        const double s = path.s_tilde[i];
        if (i % stride == 0 && i / stride < n_dates) {
            const double sig = sig_check_sq * (1.0 - path.times[i]);
            led.trade_to(pricer.delta(s, sig), s, path.s0[i], kappa);
            ++out.n_rebalances;
            out.rebalance_times.push_back(path.times[i]);
        }
        const double vt = led.vtilde(s);
        out.vtilde_path[i] = vt;
        out.value_path[i] = path.s0[i] * vt;
        const double sig_rem = sig_check_sq * (1.0 - path.times[i]);
        const double ref = pricer.price(s, std::max(sig_rem, 0.0));
        out.z_path[i] = kappa > 0.0 ? (ref - vt) / kappa : ref - vt;
    }
    out.terminal_shortfall = payoff(path.s1[n]) - out.value_path[n];
    out.total_cost_paid = led.cost_cash;
    out.total_cost_paid_discounted = led.cost_disc;
    out.mean_steps_per_rebalance = static_cast<double>(stride);
    return out;
}

} // namespace hedgelab
