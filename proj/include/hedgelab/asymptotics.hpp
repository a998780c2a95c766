#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "hedgelab/errors.hpp"
#include "hedgelab/hedging.hpp"
#include "hedgelab/market.hpp"
#include "hedgelab/payoff.hpp"
#include "hedgelab/rng.hpp"
#include "hedgelab/stats.hpp"

namespace hedgelab {

/// Asymptotic-variance coefficient of the equidistant (enlarged-volatility)
/// strategy, as a function of x = sigma / kappa0.
inline double beta(double x) {
    if (!(x > 0.0)) throw invalid_input("beta: x must be positive");
    const double sqrt_2_pi = 0.7978845608028654; // sqrt(2/pi)
    const double two_over_pi = 0.6366197723675814;
    return 0.5 * x * x + sqrt_2_pi * x + 1.0 - two_over_pi;
}

/// Asymptotic-variance coefficient of the hitting-time strategy at the
/// initial-price-matched alpha; equals |alpha + 2|^2 / 6 with
/// alpha = x sqrt(pi/2).
inline double beta_hat(double x) {
    if (!(x > 0.0)) throw invalid_input("beta_hat: x must be positive");
    const double pi = 3.141592653589793;
    const double sqrt_2pi_over_3 = 0.8355427582103334; // sqrt(2 pi)/3
    return pi * x * x / 12.0 + sqrt_2pi_over_3 * x + 2.0 / 3.0;
}

/// alpha that gives the hitting-time strategy the same initial price as the
/// equidistant strategy with cost parameter kappa0.
inline double alpha_from_kappa0(double sigma, double kappa0) {
    if (!(sigma > 0.0) || !(kappa0 > 0.0))
        throw invalid_input("alpha_from_kappa0: sigma and kappa0 must be positive");
    const double sqrt_pi_2 = 1.2533141373155003; // sqrt(pi/2)
    return sigma / kappa0 * sqrt_pi_2;
}

/// Clock of the limiting time-changed Brownian motion:
/// Q_t = (|alpha +- 2|^2 / 6) int_0^t (s_tilde^2 Gamma)^2 dqv, integrated by
/// the trapezoid rule on the path's grid with Gamma at the adjusted variance.
/// Entries from the first grid point with qv >= sigma_hat_sq onward are frozen
/// at the last pre-tau value; statistics must only be read strictly before tau.
inline std::vector<double> limit_q(const PathGrid& path, const Payoff& payoff,
                                   const StrategyConfig& cfg) {
    detail::check_path(path);
    detail::require_condition_one(payoff);
    if (!(cfg.sigma_hat_sq > 0.0)) throw invalid_input("limit_q: sigma_hat_sq must be positive");
    if (!(cfg.alpha > 0.0)) throw invalid_input("limit_q: alpha must be positive");
    if (payoff.convexity() == Convexity::concave && !(cfg.alpha > 2.0))
        throw invalid_input("limit_q: concave payoffs require alpha > 2");

    const bool convex = payoff.convexity() == Convexity::convex;
    const double ctil = cfg.variance_factor(payoff);
    const double edge = convex ? cfg.alpha + 2.0 : cfg.alpha - 2.0;
    const double pref = edge * edge / 6.0;
    const detail::DiscountedPricer pricer(payoff);

    const std::size_t n = path.n_steps();
    std::vector<double> q(n + 1, 0.0);
    const auto integrand = [&](std::size_t i) {
        const double s = path.s_tilde[i];
        const double g = pricer.gamma(s, ctil * (cfg.sigma_hat_sq - path.qv[i]));
        const double x = s * s * g;
        return x * x;
    };
    double g_prev = integrand(0);
    for (std::size_t i = 1; i <= n; ++i) {
        if (path.qv[i] >= cfg.sigma_hat_sq) {
            for (std::size_t j = i; j <= n; ++j) q[j] = q[i - 1];
            break;
        }
        const double g_cur = integrand(i);
        q[i] = q[i - 1] + 0.5 * (g_prev + g_cur) * (path.qv[i] - path.qv[i - 1]);
        g_prev = g_cur;
    }
    for (double& v : q) v *= pref;
    return q;
}

namespace detail {

/// Run fn(path_index, worker_index) for every path, fanning out to a worker
/// pool. Results must be written to per-path slots; the schedule never
/// influences any output.
template <class Fn>
void parallel_paths(std::size_t n_paths, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n_paths < 2) {
        for (std::size_t i = 0; i < n_paths; ++i) fn(i, 0);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mtx;
    std::exception_ptr first_error;
    const std::size_t block = 64;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (;;) {
                    const std::size_t lo = next.fetch_add(block);
                    if (lo >= n_paths) return;
                    const std::size_t hi = std::min(lo + block, n_paths);
                    for (std::size_t i = lo; i < hi; ++i) fn(i, w);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mtx);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

/// Precomputed per-grid data shared by every path of a study sweep; only
/// models with a deterministic variance curve qualify. Built with the same
/// arithmetic as simulate_path so table entries match the engine bitwise.
struct SweepTables {
    double dt = 0.0;
    double log_s0 = 0.0;
    std::vector<double> half_vdt;  // 0.5 v dt per step
    std::vector<double> vol_step;  // sqrt(v dt) per step
    std::vector<double> qv;        // left-point accumulation
    std::vector<double> times;
    std::vector<double> sig;       // ctil * max(sigma_hat_sq - qv, 0)
    std::vector<double> sqrt_sig;

    static SweepTables build(const ModelSpec& model, double horizon, std::size_t steps,
                             double sigma_hat_sq, double ctil) {
        if (model.variant == ModelSpec::Variant::stoch_vol)
            throw invalid_input("study kernel requires a deterministic variance curve");
        SweepTables tb;
        const std::size_t n = steps;
        tb.dt = horizon / static_cast<double>(n);
        tb.log_s0 = std::log(model.s1_init) + model.r * horizon;
        tb.half_vdt.resize(n);
        tb.vol_step.resize(n);
        tb.qv.resize(n + 1);
        tb.times.resize(n + 1);
        tb.sig.resize(n + 1);
        tb.sqrt_sig.resize(n + 1);
        tb.qv[0] = 0.0;
        for (std::size_t i = 0; i <= n; ++i) tb.times[i] = tb.dt * static_cast<double>(i);
        tb.times[n] = horizon;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = model.variant == ModelSpec::Variant::black_scholes
                                 ? model.sigma * model.sigma
                                 : model.curve.variance_at(tb.times[i]);
            tb.half_vdt[i] = 0.5 * v * tb.dt;
            tb.vol_step[i] = std::sqrt(v * tb.dt);
            tb.qv[i + 1] = tb.qv[i] + v * tb.dt;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            const double rem = sigma_hat_sq - tb.qv[i];
            tb.sig[i] = ctil * std::max(rem, 0.0);
            tb.sqrt_sig[i] = std::sqrt(tb.sig[i]);
        }
        return tb;
    }
};

/// One hitting-time ledger driven by d1 bounds; state mirrors the general
/// engine's vanilla fast path operation for operation.
struct VanillaLedger {
    double kappa = 0.0;
    double pi = 0.0;
    double pi0 = 0.0;
    double cost_disc = 0.0;
    double d1_lo = 0.0, d1_hi = 0.0;
    std::uint32_t count = 0;
    bool frozen = false;

    void set_bounds(double d1_a, double threshold) {
        const double u_anchor = norm_cdf(d1_a);
        const double up = u_anchor + threshold;
        const double dn = u_anchor - threshold;
        d1_hi = up < 1.0 ? norm_cdf_inv(up) : std::numeric_limits<double>::infinity();
        d1_lo = dn > 0.0 ? norm_cdf_inv(dn) : -std::numeric_limits<double>::infinity();
    }

    void trade_to(double pi_new, double s) {
        const double dpi = pi_new - pi;
        const double cost = kappa * std::fabs(dpi) * s;
        pi0 -= dpi * s + cost;
        pi = pi_new;
        cost_disc += cost;
    }
};

} // namespace detail

struct CheckpointStats {
    double t = 0.0;
    double kappa = 0.0;
    std::size_t paths = 0;
    double mean_z = 0.0, var_z = 0.0, se_mean_z = 0.0;
    double mean_q = 0.0;
    double variance_ratio = 0.0; // var(Z_t) / mean(Q_t)
    double mse_ratio = 0.0;      // mean(Z_t^2) / mean(Q_t)
    double skewness_norm = 0.0;  // moments of Z_t / sqrt(Q_t)
    double excess_kurtosis_norm = 0.0;
    double ks_norm = 0.0;
    double corr_with_stilde = 0.0;
    double mean_k2n = 0.0;      // mean(kappa^2 N_t)
    double count_limit = 0.0;   // mean(qv_t) / alpha^2
    double ratio_half_width = 0.0; // 99% chi^2 band for the variance ratio
    std::size_t alarm_count = 0;
    bool degenerate = false;    // too few paths for variance statistics
};

/// Raw per-path study output, kept for CSV export and custom analysis.
/// Layouts: seeds[m]; q, stilde, qv indexed [c*paths + m]; z, counts indexed
/// [(k*C + c)*paths + m]; alarms indexed [k*paths + m].
struct ConvergenceRaw {
    std::vector<std::uint64_t> seeds;
    std::vector<double> q;
    std::vector<double> stilde;
    std::vector<double> qv;
    std::vector<double> z;
    std::vector<std::uint32_t> counts;
    std::vector<std::uint8_t> alarms;
};

struct ConvergenceReport {
    std::vector<double> kappa_ladder;
    std::vector<double> checkpoints;
    std::size_t paths = 0;
    std::uint64_t master_seed = 0;
    double horizon = 0.0;
    std::size_t grid_steps = 0;
    std::vector<CheckpointStats> cells; // [k * checkpoints.size() + c]
    ConvergenceRaw raw;
};

struct LelandArm {
    std::size_t n = 0;
    double kappa_n = 0.0;
    std::size_t grid_steps = 0;
    std::size_t paths = 0;
    double mse_leland = 0.0, mse_hitting = 0.0, ratio = 0.0;
    double se_mse_leland = 0.0, se_mse_hitting = 0.0, se_ratio = 0.0;
    double mean_z_leland = 0.0, mean_z_hitting = 0.0;
    double mean_count_hitting = 0.0;
    double count_ratio = 0.0; // mean_count_hitting / n
    std::size_t alarm_count = 0;
    std::vector<double> z_leland, z_hitting; // raw terminal Z per path
    std::vector<std::uint32_t> counts_hitting;
};

struct LelandReport {
    double sigma = 0.0, kappa0 = 0.0, alpha = 0.0;
    double beta_value = 0.0, beta_hat_value = 0.0, target_ratio = 0.0;
    double gamma_integral = 0.0; // E[ int (s~^2 Gamma)^2 dqv ], fine-grid MC
    double predicted_mse_leland = 0.0, predicted_mse_hitting = 0.0;
    double count_target = 0.6366197723675814; // 2/pi
    std::uint64_t master_seed = 0;
    std::size_t paths = 0;
    std::vector<LelandArm> arms;
};

namespace detail {

struct ConvSlots {
    std::size_t paths = 0, n_ck = 0, n_k = 0;
    ConvergenceRaw raw;

    void init(std::size_t m, std::size_t c, std::size_t k) {
        paths = m;
        n_ck = c;
        n_k = k;
        raw.seeds.resize(m);
        raw.q.assign(c * m, 0.0);
        raw.stilde.assign(c * m, 0.0);
        raw.qv.assign(c * m, 0.0);
        raw.z.assign(k * c * m, 0.0);
        raw.counts.assign(k * c * m, 0);
        raw.alarms.assign(k * m, 0);
    }
};

/// Vanilla multi-kappa sweep on a deterministic-variance model: one pass over
/// the increments updates every kappa ledger, accumulates the Q clock with
/// stride-sampled trapezoids, and snapshots Z, Q, N at the checkpoints.
/// Arithmetic deliberately replicates run_hitting_time step by step.
class ConvKernel {
public:
    ConvKernel(const SweepTables& tb, const Payoff& payoff, const StrategyConfig& base,
               const std::vector<double>& kappas, const std::vector<std::size_t>& ck_idx,
               std::size_t q_stride)
        : tb_(&tb), pricer_(payoff), base_(base), kappas_(kappas), ck_idx_(ck_idx),
          q_stride_(q_stride), is_call_(payoff.kind() == Payoff::Kind::call),
          logk_(std::log(payoff.strike())),
          pref_(payoff.convexity() == Convexity::convex
                    ? (base.alpha + 2.0) * (base.alpha + 2.0) / 6.0
                    : (base.alpha - 2.0) * (base.alpha - 2.0) / 6.0) {
        ledgers_.resize(kappas.size());
    }

    void run_path(std::uint64_t seed, std::size_t m, ConvSlots& out) {
        const SweepTables& tb = *tb_;
        const std::size_t last = ck_idx_.back();
        PathRng rng(seed);
        double ls = tb.log_s0;

        const double s0 = std::exp(ls);
        const double d1_0 = (ls - logk_ + 0.5 * tb.sig[0]) / std::sqrt(tb.sig[0]);
        const double u0 = norm_cdf(d1_0);
        const double pi_init = is_call_ ? u0 : u0 - 1.0;
        const double gamma0 = norm_pdf(d1_0) / (s0 * std::sqrt(tb.sig[0]));
        const double p0 = pricer_.price(s0, tb.sig[0]);
        for (std::size_t k = 0; k < kappas_.size(); ++k) {
            VanillaLedger& led = ledgers_[k];
            led = VanillaLedger{};
            led.kappa = kappas_[k];
            led.pi = pi_init;
            led.pi0 = p0 - pi_init * s0;
            led.cost_disc = led.kappa * std::fabs(pi_init) * s0;
            led.set_bounds(d1_0, base_.alpha * led.kappa * s0 * std::fabs(gamma0));
        }

        double q_acc = 0.0;
        std::size_t q_last = 0;
        double g_prev = q_integrand(ls, d1_0, 0);
        std::size_t next_ck = 0;

        for (std::size_t i = 1; i <= last; ++i) {
            const double z = rng.normal(i - 1, 0);
            ls = (ls - tb.half_vdt[i - 1]) + tb.vol_step[i - 1] * z;
            const double d1 = (ls - logk_ + 0.5 * tb.sig[i]) / tb.sqrt_sig[i];

            for (std::size_t k = 0; k < kappas_.size(); ++k) {
                VanillaLedger& led = ledgers_[k];
                if (d1 >= led.d1_hi || d1 <= led.d1_lo) {
                    const double s = std::exp(ls);
                    const double u = norm_cdf(d1);
                    led.trade_to(is_call_ ? u : u - 1.0, s);
                    const double gam = norm_pdf(d1) / (s * tb.sqrt_sig[i]);
                    led.set_bounds(d1, base_.alpha * led.kappa * s * std::fabs(gam));
                    ++led.count;
                }
            }

            const bool at_ck = next_ck < ck_idx_.size() && i == ck_idx_[next_ck];
            if (i - q_last >= q_stride_ || at_ck) {
                const double g_cur = q_integrand(ls, d1, i);
                q_acc += 0.5 * (g_prev + g_cur) * (tb.qv[i] - tb.qv[q_last]);
                g_prev = g_cur;
                q_last = i;
            }
            if (at_ck) {
                const double s = std::exp(ls);
                const double ptil = pricer_.price(s, tb.sig[i]);
                const std::size_t cm = next_ck * out.paths + m;
                out.raw.q[cm] = pref_ * q_acc;
                out.raw.stilde[cm] = s;
                out.raw.qv[cm] = tb.qv[i];
                for (std::size_t k = 0; k < kappas_.size(); ++k) {
                    const VanillaLedger& led = ledgers_[k];
                    const std::size_t kcm = (k * out.n_ck + next_ck) * out.paths + m;
                    out.raw.z[kcm] = (ptil - (led.pi * s + led.pi0)) / led.kappa;
                    out.raw.counts[kcm] = led.count;
                }
                ++next_ck;
            }
        }
        for (std::size_t k = 0; k < kappas_.size(); ++k) {
            const std::uint32_t cnt = ledgers_[k].count;
            const bool alarm =
                cnt > 0 && static_cast<double>(last) / static_cast<double>(cnt) <
                               static_cast<double>(base_.resolution_floor);
            out.raw.alarms[k * out.paths + m] = alarm ? 1 : 0;
        }
        out.raw.seeds[m] = seed;
    }

private:
    double q_integrand(double ls, double d1, std::size_t i) const {
        const double nd = norm_pdf(d1);
        // (s~^2 Gamma)^2 with Gamma = phi(d1) / (s~ sqrt(sig))
        return std::exp(2.0 * ls) * nd * nd / tb_->sig[i];
    }

    const SweepTables* tb_;
    DiscountedPricer pricer_;
    StrategyConfig base_;
    std::vector<double> kappas_;
    std::vector<std::size_t> ck_idx_;
    std::size_t q_stride_;
    bool is_call_;
    double logk_;
    double pref_;
    std::vector<VanillaLedger> ledgers_;
};

inline std::size_t checkpoint_index(double t, double dt, std::size_t steps, const char* what) {
    const double x = t / dt;
    const auto idx = static_cast<std::size_t>(std::llround(x));
    if (idx == 0 || idx > steps || std::fabs(x - static_cast<double>(idx)) > 1e-9)
        throw invalid_input(std::string(what) + ": checkpoint must coincide with a grid time");
    return idx;
}

} // namespace detail

/// Multi-kappa Monte Carlo study of the hedging-error CLT: common random
/// numbers across the ladder (one simulated path per seed drives every kappa),
/// Z and N snapshots at the checkpoints, Q from the same path, and the
/// normality/independence statistics of Z/sqrt(Q). Checkpoints must lie
/// strictly before the variance-budget exhaustion time.
inline ConvergenceReport convergence_study(const ModelSpec& model, const Payoff& payoff,
                                           const StrategyConfig& cfg_base,
                                           const std::vector<double>& kappa_ladder,
                                           std::size_t paths,
                                           const std::vector<double>& checkpoints,
                                           std::uint64_t master_seed, double horizon,
                                           std::size_t grid_steps, unsigned threads = 1) {
    model.validate();
    detail::require_condition_one(payoff);
    if (kappa_ladder.empty()) throw invalid_input("convergence_study: empty kappa ladder");
    for (std::size_t k = 0; k + 1 < kappa_ladder.size(); ++k)
        if (!(kappa_ladder[k] > kappa_ladder[k + 1]))
            throw invalid_input("convergence_study: kappa ladder must be strictly decreasing");
    for (double k : kappa_ladder)
        if (!(k > 0.0)) throw invalid_input("convergence_study: kappa must be positive");
    if (paths == 0) throw invalid_input("convergence_study: need at least one path");
    if (checkpoints.empty()) throw invalid_input("convergence_study: no checkpoints");
    if (!(horizon > 0.0) || grid_steps == 0)
        throw invalid_input("convergence_study: horizon and grid steps must be positive");
    {
        StrategyConfig probe = cfg_base;
        probe.kind = StrategyKind::hitting_time;
        probe.kappa = kappa_ladder.front();
        probe.validate(payoff);
    }

    const double dt = horizon / static_cast<double>(grid_steps);
    std::vector<std::size_t> ck_idx;
    for (double t : checkpoints) {
        const std::size_t idx = detail::checkpoint_index(t, dt, grid_steps, "convergence_study");
        if (!ck_idx.empty() && idx <= ck_idx.back())
            throw invalid_input("convergence_study: checkpoints must be strictly increasing");
        ck_idx.push_back(idx);
    }

    const std::size_t C = checkpoints.size(), K = kappa_ladder.size();
    detail::ConvSlots slots;
    slots.init(paths, C, K);

    const bool kernel_ok = payoff.is_vanilla() &&
                           model.variant != ModelSpec::Variant::stoch_vol;
    const double ctil = cfg_base.variance_factor(payoff);

    if (kernel_ok) {
        const detail::SweepTables tb = detail::SweepTables::build(
            model, horizon, grid_steps, cfg_base.sigma_hat_sq, ctil);
        if (tb.qv[ck_idx.back()] >= cfg_base.sigma_hat_sq)
            throw invalid_input("convergence_study: checkpoints must precede the "
                                "variance-budget exhaustion time");
        std::vector<std::unique_ptr<detail::ConvKernel>> kernels;
        const unsigned nw = std::max(1u, threads);
        for (unsigned w = 0; w < nw; ++w)
            kernels.push_back(std::make_unique<detail::ConvKernel>(
                tb, payoff, cfg_base, kappa_ladder, ck_idx, 8));
        detail::parallel_paths(paths, nw, [&](std::size_t i, unsigned w) {
            kernels[w]->run_path(path_seed(master_seed, i), i, slots);
        });
    } else {
        // General route: materialize each path and run the engine per kappa.
        if (model.variant != ModelSpec::Variant::stoch_vol) {
            const detail::SweepTables tb = detail::SweepTables::build(
                model, horizon, grid_steps, cfg_base.sigma_hat_sq, ctil);
            if (tb.qv[ck_idx.back()] >= cfg_base.sigma_hat_sq)
                throw invalid_input("convergence_study: checkpoints must precede the "
                                    "variance-budget exhaustion time");
        }
        detail::parallel_paths(paths, std::max(1u, threads), [&](std::size_t i, unsigned) {
            const std::uint64_t seed = path_seed(master_seed, i);
            const PathGrid path = simulate_path(model, horizon, grid_steps, seed);
            if (path.qv[ck_idx.back()] >= cfg_base.sigma_hat_sq)
                throw invalid_input("convergence_study: a path exhausted the variance "
                                    "budget before the last checkpoint");
            const std::vector<double> q = limit_q(path, payoff, cfg_base);
            slots.raw.seeds[i] = seed;
            for (std::size_t c = 0; c < C; ++c) {
                const std::size_t idx = ck_idx[c];
                const std::size_t cm = c * paths + i;
                slots.raw.q[cm] = q[idx];
                slots.raw.stilde[cm] = path.s_tilde[idx];
                slots.raw.qv[cm] = path.qv[idx];
            }
            for (std::size_t k = 0; k < K; ++k) {
                StrategyConfig cfg = cfg_base;
                cfg.kind = StrategyKind::hitting_time;
                cfg.kappa = kappa_ladder[k];
                const HedgeOutcome out = run_hitting_time(path, payoff, cfg);
                for (std::size_t c = 0; c < C; ++c) {
                    const std::size_t idx = ck_idx[c];
                    const std::size_t kcm = (k * C + c) * paths + i;
                    slots.raw.z[kcm] = out.z_path[idx];
                    std::uint32_t cnt = 0;
                    for (double tr : out.rebalance_times) {
                        if (tr > path.times[idx]) break;
                        ++cnt;
                    }
                    if (cnt > 0) --cnt; // setup trade is not a rebalance
                    slots.raw.counts[kcm] = cnt;
                }
                slots.raw.alarms[k * paths + i] = out.grid_alarm ? 1 : 0;
            }
        });
    }

    ConvergenceReport rep;
    rep.kappa_ladder = kappa_ladder;
    rep.checkpoints = checkpoints;
    rep.paths = paths;
    rep.master_seed = master_seed;
    rep.horizon = horizon;
    rep.grid_steps = grid_steps;
    rep.raw = std::move(slots.raw);

    for (std::size_t k = 0; k < K; ++k) {
        std::size_t alarm_count = 0;
        for (std::size_t i = 0; i < paths; ++i) alarm_count += rep.raw.alarms[k * paths + i];
        for (std::size_t c = 0; c < C; ++c) {
            CheckpointStats cs;
            cs.t = checkpoints[c];
            cs.kappa = kappa_ladder[k];
            cs.paths = paths;
            cs.alarm_count = alarm_count;
            std::vector<double> z(paths), zn(paths), st(paths);
            double sum_q = 0.0, sum_z2 = 0.0, sum_qv = 0.0, sum_n = 0.0;
            for (std::size_t i = 0; i < paths; ++i) {
                const std::size_t cm = c * paths + i;
                const std::size_t kcm = (k * C + c) * paths + i;
                z[i] = rep.raw.z[kcm];
                st[i] = rep.raw.stilde[cm];
                zn[i] = z[i] / std::sqrt(rep.raw.q[cm]);
                sum_q += rep.raw.q[cm];
                sum_qv += rep.raw.qv[cm];
                sum_z2 += z[i] * z[i];
                sum_n += rep.raw.counts[kcm];
            }
            const double mp = static_cast<double>(paths);
            cs.mean_q = sum_q / mp;
            cs.count_limit = sum_qv / mp / (cfg_base.alpha * cfg_base.alpha);
            cs.mean_k2n = kappa_ladder[k] * kappa_ladder[k] * sum_n / mp;
            cs.mse_ratio = sum_z2 / mp / cs.mean_q;
            if (paths < 2) {
                cs.degenerate = true;
                cs.mean_z = z[0];
                cs.var_z = std::numeric_limits<double>::quiet_NaN();
                cs.variance_ratio = std::numeric_limits<double>::quiet_NaN();
            } else {
                const stats::Moments mz = stats::moments(z);
                cs.mean_z = mz.mean;
                cs.var_z = mz.variance;
                cs.se_mean_z = mz.std_error_mean;
                cs.variance_ratio = cs.var_z / cs.mean_q;
                const stats::Moments mn = stats::moments(zn);
                cs.skewness_norm = mn.skewness;
                cs.excess_kurtosis_norm = mn.excess_kurtosis;
                cs.ks_norm = stats::ks_distance_normal(zn);
                cs.corr_with_stilde = stats::correlation(zn, st);
                cs.ratio_half_width = stats::variance_ratio_half_width(paths);
            }
            rep.cells.push_back(cs);
        }
    }
    return rep;
}

/// Head-to-head comparison of the equidistant and hitting-time strategies at
/// matched initial price (alpha from kappa0) and matched cost kappa_n =
/// kappa0 / sqrt(n), both run on the same fine paths. Reports terminal MSE of
/// Z for both, their ratio against beta/beta_hat, and the rebalance-count
/// ratio against 2/pi.
inline LelandReport compare_leland(double sigma, double kappa0,
                                   const std::vector<std::size_t>& n_ladder,
                                   const Payoff& payoff, std::size_t paths,
                                   std::uint64_t master_seed, std::size_t steps_factor = 400,
                                   unsigned threads = 1, double s1_init = 100.0) {
    if (n_ladder.empty()) throw invalid_input("compare_leland: empty n ladder");
    for (std::size_t n : n_ladder)
        if (n < 1) throw invalid_input("compare_leland: partition sizes must be positive");
    if (paths == 0) throw invalid_input("compare_leland: need at least one path");
    if (payoff.convexity() != Convexity::convex)
        throw invalid_input("compare_leland: payoff must be convex");
    detail::require_condition_one(payoff);
    if (steps_factor < 1) throw invalid_input("compare_leland: steps_factor must be positive");

    LelandReport rep;
    rep.sigma = sigma;
    rep.kappa0 = kappa0;
    rep.alpha = alpha_from_kappa0(sigma, kappa0);
    const double x = sigma / kappa0;
    rep.beta_value = beta(x);
    rep.beta_hat_value = beta_hat(x);
    rep.target_ratio = rep.beta_value / rep.beta_hat_value;
    rep.master_seed = master_seed;
    rep.paths = paths;

    const ModelSpec model = ModelSpec::black_scholes(sigma, 0.0, s1_init);
    const double sigma_hat_sq = sigma * sigma;

    // Common scale E[int (s~^2 Gamma)^2 dqv] for the absolute beta targets,
    // by moderate-size fine-grid MC; the pass/fail ratio does not use it.
    {
        StrategyConfig qcfg;
        qcfg.sigma_hat_sq = sigma_hat_sq;
        qcfg.alpha = rep.alpha;
        qcfg.kappa = 1.0;
        const double pref = (rep.alpha + 2.0) * (rep.alpha + 2.0) / 6.0;
        const std::size_t gm = 2048, gsteps = 4096;
        std::vector<double> qt(gm);
        detail::parallel_paths(gm, std::max(1u, threads), [&](std::size_t i, unsigned) {
            const PathGrid p = simulate_path(model, 1.0, gsteps,
                                             path_seed(mix64(master_seed ^ 0x5ca1ab1eu), i));
            qt[i] = limit_q(p, payoff, qcfg).back() / pref;
        });
        double acc = 0.0;
        for (double v : qt) acc += v;
        rep.gamma_integral = acc / static_cast<double>(gm);
        rep.predicted_mse_leland = rep.beta_value * rep.gamma_integral;
        rep.predicted_mse_hitting = rep.beta_hat_value * rep.gamma_integral;
    }

    const bool vanilla = payoff.is_vanilla();
    const double sqrt_8_pi = 1.5957691216057308;

    for (std::size_t n_dates : n_ladder) {
        LelandArm arm;
        arm.n = n_dates;
        arm.kappa_n = kappa0 / std::sqrt(static_cast<double>(n_dates));
        arm.grid_steps = n_dates * steps_factor;
        arm.paths = paths;
        arm.z_leland.resize(paths);
        arm.z_hitting.resize(paths);
        arm.counts_hitting.resize(paths);
        std::vector<std::uint8_t> alarms(paths, 0);

        const double kappa_n = arm.kappa_n;
        const std::size_t steps = arm.grid_steps;

        if (vanilla) {
            const double ctil = 1.0 + 2.0 / rep.alpha;
            const detail::SweepTables tb =
                detail::SweepTables::build(model, 1.0, steps, sigma_hat_sq, ctil);
            const double sig_check_sq =
                sigma * sigma +
                sigma * std::sqrt(static_cast<double>(n_dates)) * kappa_n * sqrt_8_pi;
            const detail::DiscountedPricer pricer(payoff);
            const bool is_call = payoff.kind() == Payoff::Kind::call;
            const double logk = std::log(payoff.strike());
            const std::size_t stride = steps / n_dates;
            const std::size_t floor_cfg = StrategyConfig{}.resolution_floor;

            detail::parallel_paths(paths, std::max(1u, threads), [&](std::size_t i, unsigned) {
                const std::uint64_t seed = path_seed(master_seed, i);
                PathRng rng(seed);
                double ls = tb.log_s0;

                const double s_init = std::exp(ls);
                const double d1_0 = (ls - logk + 0.5 * tb.sig[0]) / std::sqrt(tb.sig[0]);
                const double u0 = norm_cdf(d1_0);
                detail::VanillaLedger hit;
                hit.kappa = kappa_n;
                hit.pi = is_call ? u0 : u0 - 1.0;
                const double p0 = pricer.price(s_init, tb.sig[0]);
                hit.pi0 = p0 - hit.pi * s_init;
                const double gamma0 = norm_pdf(d1_0) / (s_init * std::sqrt(tb.sig[0]));
                hit.set_bounds(d1_0, rep.alpha * kappa_n * s_init * std::fabs(gamma0));

                detail::VanillaLedger lel;
                lel.kappa = kappa_n;
                lel.pi = pricer.delta(s_init, sig_check_sq);
                lel.pi0 = pricer.price(s_init, sig_check_sq) - lel.pi * s_init;

                for (std::size_t i2 = 1; i2 <= steps; ++i2) {
                    const double z = rng.normal(i2 - 1, 0);
                    ls = (ls - tb.half_vdt[i2 - 1]) + tb.vol_step[i2 - 1] * z;
                    if (!hit.frozen) {
                        if (tb.qv[i2] >= sigma_hat_sq) {
                            const double s = std::exp(ls);
                            hit.trade_to(payoff.kink_selection(s).first, s);
                            hit.frozen = true;
                        } else {
                            const double d1 = (ls - logk + 0.5 * tb.sig[i2]) / tb.sqrt_sig[i2];
                            if (d1 >= hit.d1_hi || d1 <= hit.d1_lo) {
                                const double s = std::exp(ls);
                                const double u = norm_cdf(d1);
                                hit.trade_to(is_call ? u : u - 1.0, s);
                                const double gam = norm_pdf(d1) / (s * tb.sqrt_sig[i2]);
                                hit.set_bounds(d1, rep.alpha * kappa_n * s * std::fabs(gam));
                                ++hit.count;
                            }
                        }
                    }
                    if (i2 % stride == 0 && i2 / stride < n_dates) {
                        const double s = std::exp(ls);
                        const double sig = sig_check_sq * (1.0 - tb.times[i2]);
                        lel.trade_to(pricer.delta(s, sig), s);
                        ++lel.count;
                    }
                }
                const double s_fin = std::exp(ls);
                // Terminal marks via the same pricer calls the engine makes;
                // both adjusted variances are zero (or clamped) at the horizon.
                const double mark_h = pricer.price(s_fin, tb.sig[steps]);
                const double mark_l =
                    pricer.price(s_fin, sig_check_sq * (1.0 - tb.times[steps]));
                arm.z_hitting[i] = (mark_h - (hit.pi * s_fin + hit.pi0)) / kappa_n;
                arm.z_leland[i] = (mark_l - (lel.pi * s_fin + lel.pi0)) / kappa_n;
                arm.counts_hitting[i] = hit.count;
                alarms[i] = hit.count > 0 &&
                                    static_cast<double>(steps) / hit.count <
                                        static_cast<double>(floor_cfg)
                                ? 1
                                : 0;
            });
        } else {
            detail::parallel_paths(paths, std::max(1u, threads), [&](std::size_t i, unsigned) {
                const std::uint64_t seed = path_seed(master_seed, i);
                const PathGrid path = simulate_path(model, 1.0, steps, seed);
                StrategyConfig cfg;
                cfg.kind = StrategyKind::hitting_time;
                cfg.sigma_hat_sq = sigma_hat_sq;
                cfg.alpha = rep.alpha;
                cfg.kappa = kappa_n;
                const HedgeOutcome hit = run_hitting_time(path, payoff, cfg);
                const HedgeOutcome lel = run_leland(path, payoff, sigma, kappa_n, n_dates);
                arm.z_hitting[i] = hit.z_path.back();
                arm.z_leland[i] = lel.z_path.back();
                arm.counts_hitting[i] = static_cast<std::uint32_t>(hit.n_rebalances);
                alarms[i] = hit.grid_alarm ? 1 : 0;
            });
        }

        double sl = 0.0, sh = 0.0, ml = 0.0, mh = 0.0, cnt = 0.0;
        for (std::size_t i = 0; i < paths; ++i) {
            sl += arm.z_leland[i] * arm.z_leland[i];
            sh += arm.z_hitting[i] * arm.z_hitting[i];
            ml += arm.z_leland[i];
            mh += arm.z_hitting[i];
            cnt += arm.counts_hitting[i];
            arm.alarm_count += alarms[i];
        }
        const double mp = static_cast<double>(paths);
        arm.mse_leland = sl / mp;
        arm.mse_hitting = sh / mp;
        arm.ratio = arm.mse_leland / arm.mse_hitting;
        arm.mean_z_leland = ml / mp;
        arm.mean_z_hitting = mh / mp;
        arm.mean_count_hitting = cnt / mp;
        arm.count_ratio = arm.mean_count_hitting / static_cast<double>(n_dates);
        if (paths >= 2) {
            double vl = 0.0, vh = 0.0, cv = 0.0;
            for (std::size_t i = 0; i < paths; ++i) {
                const double dl = arm.z_leland[i] * arm.z_leland[i] - arm.mse_leland;
                const double dh = arm.z_hitting[i] * arm.z_hitting[i] - arm.mse_hitting;
                vl += dl * dl;
                vh += dh * dh;
                cv += dl * dh;
            }
            vl /= mp - 1.0;
            vh /= mp - 1.0;
            cv /= mp - 1.0;
            arm.se_mse_leland = std::sqrt(vl / mp);
            arm.se_mse_hitting = std::sqrt(vh / mp);
            const double a = arm.mse_leland, b = arm.mse_hitting;
            const double var_ratio =
                (vl / (b * b) + vh * a * a / (b * b * b * b) - 2.0 * cv * a / (b * b * b)) / mp;
            arm.se_ratio = var_ratio > 0.0 ? std::sqrt(var_ratio) : 0.0;
        }
        rep.arms.push_back(std::move(arm));
    }
    return rep;
}

} // namespace hedgelab
