#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hedgelab/asymptotics.hpp"
#include "hedgelab/config.hpp"
#include "hedgelab/errors.hpp"
#include "hedgelab/hedging.hpp"
#include "hedgelab/market.hpp"
#include "hedgelab/pricing.hpp"
#include "hedgelab/report.hpp"
#include "hedgelab/rng.hpp"
#include "hedgelab/stats.hpp"

namespace hedgelab::cli {

// Exit codes: 0 success, 1 invalid input, 2 completed with resolution alarms
// (artifacts are still written), 3 internal numeric failure.
inline constexpr int exit_ok = 0;
inline constexpr int exit_invalid = 1;
inline constexpr int exit_alarm = 2;
inline constexpr int exit_numeric = 3;

namespace detail_cli {

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw invalid_input("config: cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// All missing prerequisites of a subcommand are reported in one message,
/// mirroring the collect-everything contract of parse_config.
class Requirements {
public:
    explicit Requirements(std::string command) : command_(std::move(command)) {}

    void need(bool ok, const std::string& what) {
        if (!ok) missing_.push_back(what);
    }

    void check() const {
        if (missing_.empty()) return;
        std::string msg = command_ + ": config is incomplete";
        for (const auto& m : missing_) msg += "\n  - " + m;
        throw invalid_input(msg);
    }

private:
    std::string command_;
    std::vector<std::string> missing_;
};

inline std::filesystem::path require_out_dir(const ExperimentConfig& cfg,
                                             const std::string& command) {
    if (cfg.output.directory.empty())
        throw invalid_input(command +
                            ": no output directory (set output.directory or --out)");
    return std::filesystem::path(cfg.output.directory);
}

inline double require_positive_kappa(const ExperimentConfig& cfg,
                                     const std::string& command,
                                     const std::string& role) {
    if (!cfg.strategy || !(cfg.strategy->kappa > 0.0))
        throw invalid_input(command + ": strategy.kappa (" + role +
                            ") must be positive");
    return cfg.strategy->kappa;
}

inline nlohmann::json json_or_null(double v) {
    // NaN / inf have no JSON literal; nlohmann would emit null anyway, this
    // just makes the substitution explicit.
    if (!std::isfinite(v)) return nullptr;
    return v;
}

inline std::string zero_padded(std::size_t v, int width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%0*zu", width, v);
    return buf;
}

inline std::string path_dump_csv(const PathGrid& g) {
    report::CsvBuilder csv({"times", "s1", "s0", "qv"});
    for (std::size_t i = 0; i < g.times.size(); ++i) {
        csv.cell(g.times[i]).cell(g.s1[i]).cell(g.s0[i]).cell(g.qv[i]);
        csv.end_row();
    }
    return csv.body();
}

} // namespace detail_cli

/// price / greeks: evaluate the pricing function at one (S, R, Sigma) point
/// and print price, first-order sensitivities, and the four structural PDE
/// residuals as JSON. Writes the same document to the output directory when
/// one is configured.
inline int cmd_point_report(const ExperimentConfig& cfg, const std::string& command,
                            std::ostream& out) {
    detail_cli::Requirements req(command);
    req.need(cfg.payoff.has_value(), "payoff section is required");
    req.need(cfg.point.has_value(), "point section is required (spot, variance)");
    req.check();

    const GreekSet g = greeks(*cfg.payoff, *cfg.point);
    const auto res = pde_residuals(*cfg.payoff, *cfg.point);

    nlohmann::json doc;
    doc["price"] = g.price;
    doc["dP_dS"] = g.dP_dS;
    doc["d2P_dS2"] = g.d2P_dS2;
    doc["dP_dSigma"] = g.dP_dSigma;
    doc["dP_dR"] = g.dP_dR;
    doc["pde_residuals"] = {res[0], res[1], res[2], res[3]};
    doc["config"] = cfg.resolved;

    out << doc.dump(2) << "\n";
    if (!cfg.output.directory.empty() && cfg.output.json) {
        const auto dir = std::filesystem::path(cfg.output.directory);
        const std::string name = command + ".json";
        report::write_json(dir, name, doc);
        report::write_meta_sidecar(dir, command, {name});
    }
    return exit_ok;
}

/// simulate: one strategy over P paths; per-path summary rows to CSV and an
/// aggregate JSON. Grid alarms downgrade the exit status to 2.
inline int cmd_simulate(const ExperimentConfig& cfg, unsigned threads,
                        std::ostream& out) {
    detail_cli::Requirements req("simulate");
    req.need(cfg.model.has_value(), "model section is required");
    req.need(cfg.payoff.has_value(), "payoff section is required");
    req.need(cfg.strategy.has_value(), "strategy section is required");
    req.need(cfg.grid.present && cfg.grid.steps > 0, "grid.steps is required");
    req.need(cfg.run.present && cfg.run.paths > 0, "run.paths is required");
    req.check();

    const ModelSpec& model = *cfg.model;
    const Payoff& payoff = *cfg.payoff;
    const StrategyConfig& sc = *cfg.strategy;
    if (sc.kind == StrategyKind::leland &&
        model.variant != ModelSpec::Variant::black_scholes)
        throw invalid_input(
            "simulate: the equidistant strategy needs the constant-volatility model");
    const auto dir = detail_cli::require_out_dir(cfg, "simulate");

    const std::size_t paths = cfg.run.paths;
    struct Row {
        std::uint64_t seed = 0;
        std::size_t n_rebalances = 0;
        double terminal_shortfall = 0.0;
        double z_at_t = 0.0;
        double total_cost = 0.0;
        bool alarm = false;
        bool switched = false;
    };
    std::vector<Row> rows(paths);
    const std::size_t n_dump = std::min<std::size_t>(cfg.output.dump_paths, paths);
    std::vector<std::string> dumps(n_dump);

    hedgelab::detail::parallel_paths(paths, threads, [&](std::size_t m, unsigned) {
        const std::uint64_t seed = path_seed(cfg.run.master_seed, m);
        PathGrid path = simulate_path(model, cfg.grid.horizon, cfg.grid.steps, seed);
        if (cfg.grid.refine_factor > 1)
            path = refine_grid(model, path, cfg.grid.refine_factor, seed);
        if (m < n_dump) dumps[m] = detail_cli::path_dump_csv(path);

        HedgeOutcome o;
        switch (sc.kind) {
            case StrategyKind::continuous:
                o = run_continuous(path, payoff, sc.sigma_hat_sq);
                break;
            case StrategyKind::hitting_time:
                o = run_hitting_time(path, payoff, sc);
                break;
            case StrategyKind::leland:
                o = run_leland(path, payoff, model.sigma, sc.kappa, sc.leland_n);
                break;
        }
        rows[m] = Row{seed,           o.n_rebalances,    o.terminal_shortfall,
                      o.z_path.back(), o.total_cost_paid, o.grid_alarm,
                      o.switched};
    });

    std::size_t alarms = 0, switched = 0;
    std::vector<double> z(paths), shortfall(paths), cost(paths);
    double mean_reb = 0.0;
    for (std::size_t m = 0; m < paths; ++m) {
        alarms += rows[m].alarm;
        switched += rows[m].switched;
        z[m] = rows[m].z_at_t;
        shortfall[m] = rows[m].terminal_shortfall;
        cost[m] = rows[m].total_cost;
        mean_reb += static_cast<double>(rows[m].n_rebalances);
    }
    mean_reb /= static_cast<double>(paths);

    std::vector<std::string> artifacts;
    if (cfg.output.csv) {
        report::CsvBuilder csv(
            {"seed", "n_rebalances", "terminal_shortfall", "z_at_T", "total_cost"});
        for (const Row& r : rows) {
            csv.cell(r.seed)
                .cell(r.n_rebalances)
                .cell(r.terminal_shortfall)
                .cell(r.z_at_t)
                .cell(r.total_cost);
            csv.end_row();
        }
        report::write_file(dir, "simulate.csv", csv.body());
        artifacts.push_back("simulate.csv");
    }
    for (std::size_t m = 0; m < n_dump; ++m) {
        const std::string name = "path_" + detail_cli::zero_padded(m, 5) + ".csv";
        report::write_file(dir, name, dumps[m]);
        artifacts.push_back(name);
    }

    nlohmann::json doc;
    doc["paths"] = paths;
    doc["alarms"] = alarms;
    doc["switched"] = switched;
    doc["mean_n_rebalances"] = mean_reb;
    {
        nlohmann::json agg;
        double mz = 0.0, ms = 0.0, mc = 0.0;
        for (std::size_t m = 0; m < paths; ++m) {
            mz += z[m];
            ms += shortfall[m];
            mc += cost[m];
        }
        agg["mean_z_at_T"] = mz / static_cast<double>(paths);
        agg["mean_terminal_shortfall"] = ms / static_cast<double>(paths);
        agg["mean_total_cost"] = mc / static_cast<double>(paths);
        if (paths >= 2) {
            const stats::Moments mo = stats::moments(z);
            agg["var_z_at_T"] = mo.variance;
            agg["se_mean_z_at_T"] = mo.std_error_mean;
        }
        doc["aggregate"] = agg;
    }
    doc["config"] = cfg.resolved;
    if (cfg.output.json) {
        report::write_json(dir, "simulate_summary.json", doc);
        artifacts.push_back("simulate_summary.json");
    }
    report::write_meta_sidecar(dir, "simulate", artifacts);

    out << "simulate: " << paths << " paths, " << alarms << " alarms, " << switched
        << " switched, artifacts in " << dir.string() << "\n";
    return alarms > 0 ? exit_alarm : exit_ok;
}

/// converge: the variance-ratio / normality study across a kappa ladder. One
/// raw per-path CSV per ladder entry plus a JSON summary holding estimates,
/// targets, and tolerance bands side by side.
inline int cmd_converge(const ExperimentConfig& cfg, unsigned threads,
                        std::ostream& out) {
    detail_cli::Requirements req("converge");
    req.need(cfg.model.has_value(), "model section is required");
    req.need(cfg.payoff.has_value(), "payoff section is required");
    req.need(cfg.strategy && cfg.strategy->sigma_hat_sq > 0.0,
             "strategy.sigma_hat_sq is required");
    req.need(cfg.grid.present && cfg.grid.steps > 0, "grid.steps is required");
    req.need(cfg.run.present && cfg.run.paths > 0, "run.paths is required");
    req.need(cfg.run.present && !cfg.run.kappa_ladder.empty(),
             "run.kappa_ladder is required");
    req.need(cfg.run.present && !cfg.run.checkpoints.empty(),
             "run.checkpoints is required");
    req.check();

    const auto dir = detail_cli::require_out_dir(cfg, "converge");
    const ConvergenceReport rep = convergence_study(
        *cfg.model, *cfg.payoff, *cfg.strategy, cfg.run.kappa_ladder, cfg.run.paths,
        cfg.run.checkpoints, cfg.run.master_seed, cfg.grid.horizon, cfg.grid.steps,
        threads);

    const std::size_t K = rep.kappa_ladder.size();
    const std::size_t C = rep.checkpoints.size();
    const std::size_t M = rep.paths;

    std::vector<std::string> artifacts;
    if (cfg.output.csv) {
        for (std::size_t k = 0; k < K; ++k) {
            std::vector<std::string> header = {"path", "seed", "alarm"};
            for (std::size_t c = 0; c < C; ++c) {
                const std::string suf = "_c" + std::to_string(c);
                header.push_back("z" + suf);
                header.push_back("count" + suf);
                header.push_back("q" + suf);
                header.push_back("stilde" + suf);
                header.push_back("qv" + suf);
            }
            report::CsvBuilder csv(header);
            for (std::size_t m = 0; m < M; ++m) {
                csv.cell(m).cell(rep.raw.seeds[m]);
                csv.cell(static_cast<std::uint64_t>(rep.raw.alarms[k * M + m]));
                for (std::size_t c = 0; c < C; ++c) {
                    csv.cell(rep.raw.z[(k * C + c) * M + m]);
                    csv.cell(rep.raw.counts[(k * C + c) * M + m]);
                    csv.cell(rep.raw.q[c * M + m]);
                    csv.cell(rep.raw.stilde[c * M + m]);
                    csv.cell(rep.raw.qv[c * M + m]);
                }
                csv.end_row();
            }
            const std::string name = "converge_raw_k" + std::to_string(k) + ".csv";
            report::write_file(dir, name, csv.body());
            artifacts.push_back(name);
        }
    }

    std::size_t total_alarms = 0;
    nlohmann::json cells = nlohmann::json::array();
    for (const CheckpointStats& s : rep.cells) {
        total_alarms += s.alarm_count;
        nlohmann::json cell;
        cell["kappa"] = s.kappa;
        cell["t"] = s.t;
        cell["paths"] = s.paths;
        cell["alarm_count"] = s.alarm_count;
        cell["degenerate"] = s.degenerate;
        nlohmann::json est;
        est["mean_z"] = s.mean_z;
        est["var_z"] = detail_cli::json_or_null(s.var_z);
        est["se_mean_z"] = detail_cli::json_or_null(s.se_mean_z);
        est["mean_q"] = s.mean_q;
        est["variance_ratio"] = detail_cli::json_or_null(s.variance_ratio);
        est["mse_ratio"] = s.mse_ratio;
        est["skewness_norm"] = detail_cli::json_or_null(s.skewness_norm);
        est["excess_kurtosis_norm"] = detail_cli::json_or_null(s.excess_kurtosis_norm);
        est["ks_norm"] = s.ks_norm;
        est["corr_with_stilde"] = detail_cli::json_or_null(s.corr_with_stilde);
        est["mean_k2n"] = s.mean_k2n;
        cell["estimates"] = est;
        nlohmann::json tgt;
        tgt["variance_ratio"] = 1.0;
        tgt["mse_ratio"] = 1.0;
        tgt["mean_k2n"] = s.count_limit;
        tgt["skewness_norm"] = 0.0;
        tgt["excess_kurtosis_norm"] = 0.0;
        tgt["ks_norm"] = 0.0;
        tgt["corr_with_stilde"] = 0.0;
        cell["targets"] = tgt;
        nlohmann::json tol;
        tol["variance_ratio_half_width"] = detail_cli::json_or_null(s.ratio_half_width);
        cell["tolerances"] = tol;
        cells.push_back(cell);
    }

    nlohmann::json doc;
    doc["kappa_ladder"] = rep.kappa_ladder;
    doc["checkpoints"] = rep.checkpoints;
    doc["paths"] = rep.paths;
    doc["master_seed"] = rep.master_seed;
    doc["horizon"] = rep.horizon;
    doc["grid_steps"] = rep.grid_steps;
    doc["cells"] = cells;
    doc["alarms"] = total_alarms;
    doc["config"] = cfg.resolved;
    if (cfg.output.json) {
        report::write_json(dir, "converge_summary.json", doc);
        artifacts.push_back("converge_summary.json");
    }
    report::write_meta_sidecar(dir, "converge", artifacts);

    out << "converge: " << K << " kappas x " << C << " checkpoints x " << M
        << " paths, " << total_alarms << " alarms, artifacts in " << dir.string()
        << "\n";
    return total_alarms > 0 ? exit_alarm : exit_ok;
}

/// compare-leland: equidistant versus hitting-time rebalancing across a
/// partition ladder with kappa_n = kappa0 / sqrt(n). One raw CSV per arm plus
/// a JSON summary with the predicted and empirical ratios.
inline int cmd_compare_leland(const ExperimentConfig& cfg, unsigned threads,
                              std::ostream& out) {
    detail_cli::Requirements req("compare-leland");
    req.need(cfg.model.has_value(), "model section is required");
    req.need(cfg.payoff.has_value(), "payoff section is required");
    req.need(cfg.strategy.has_value(),
             "strategy section is required (kappa is the base cost rate)");
    req.need(cfg.run.present && cfg.run.paths > 0, "run.paths is required");
    req.need(cfg.run.present && !cfg.run.n_ladder.empty(), "run.n_ladder is required");
    req.check();

    const ModelSpec& model = *cfg.model;
    if (model.variant != ModelSpec::Variant::black_scholes)
        throw invalid_input("compare-leland: needs the constant-volatility model");
    if (model.r != 0.0)
        throw invalid_input("compare-leland: needs model.rate = 0 "
                            "(the equidistant strategy assumes it)");
    const double kappa0 =
        detail_cli::require_positive_kappa(cfg, "compare-leland", "base cost rate");
    const auto dir = detail_cli::require_out_dir(cfg, "compare-leland");

    const LelandReport rep = compare_leland(
        model.sigma, kappa0, cfg.run.n_ladder, *cfg.payoff, cfg.run.paths,
        cfg.run.master_seed, cfg.grid.steps_per_date, threads, model.s1_init);

    std::vector<std::string> artifacts;
    std::size_t total_alarms = 0;
    nlohmann::json arms = nlohmann::json::array();
    for (const LelandArm& arm : rep.arms) {
        total_alarms += arm.alarm_count;
        if (cfg.output.csv) {
            report::CsvBuilder csv(
                {"path", "seed", "z_leland", "z_hitting", "count_hitting"});
            for (std::size_t m = 0; m < arm.paths; ++m) {
                csv.cell(m)
                    .cell(path_seed(rep.master_seed, m))
                    .cell(arm.z_leland[m])
                    .cell(arm.z_hitting[m])
                    .cell(arm.counts_hitting[m]);
                csv.end_row();
            }
            const std::string name = "leland_raw_n" + std::to_string(arm.n) + ".csv";
            report::write_file(dir, name, csv.body());
            artifacts.push_back(name);
        }
        nlohmann::json a;
        a["n"] = arm.n;
        a["kappa_n"] = arm.kappa_n;
        a["grid_steps"] = arm.grid_steps;
        a["paths"] = arm.paths;
        a["alarm_count"] = arm.alarm_count;
        nlohmann::json est;
        est["mse_leland"] = arm.mse_leland;
        est["mse_hitting"] = arm.mse_hitting;
        est["ratio"] = arm.ratio;
        est["se_mse_leland"] = arm.se_mse_leland;
        est["se_mse_hitting"] = arm.se_mse_hitting;
        est["se_ratio"] = arm.se_ratio;
        est["mean_z_leland"] = arm.mean_z_leland;
        est["mean_z_hitting"] = arm.mean_z_hitting;
        est["mean_count_hitting"] = arm.mean_count_hitting;
        est["count_ratio"] = arm.count_ratio;
        a["estimates"] = est;
        nlohmann::json tgt;
        tgt["ratio"] = rep.target_ratio;
        tgt["count_ratio"] = rep.count_target;
        a["targets"] = tgt;
        arms.push_back(a);
    }

    nlohmann::json doc;
    doc["sigma"] = rep.sigma;
    doc["kappa0"] = rep.kappa0;
    doc["alpha"] = rep.alpha;
    doc["beta"] = rep.beta_value;
    doc["beta_hat"] = rep.beta_hat_value;
    doc["target_ratio"] = rep.target_ratio;
    doc["gamma_integral"] = rep.gamma_integral;
    doc["predicted_mse_leland"] = rep.predicted_mse_leland;
    doc["predicted_mse_hitting"] = rep.predicted_mse_hitting;
    doc["count_target"] = rep.count_target;
    doc["master_seed"] = rep.master_seed;
    doc["paths"] = rep.paths;
    doc["arms"] = arms;
    doc["alarms"] = total_alarms;
    doc["config"] = cfg.resolved;
    if (cfg.output.json) {
        report::write_json(dir, "compare_leland_summary.json", doc);
        artifacts.push_back("compare_leland_summary.json");
    }
    report::write_meta_sidecar(dir, "compare_leland", artifacts);

    out << "compare-leland: " << rep.arms.size() << " arms x " << rep.paths
        << " paths, " << total_alarms << " alarms, artifacts in " << dir.string()
        << "\n";
    return total_alarms > 0 ? exit_alarm : exit_ok;
}

/// Argument parsing and dispatch. Commands: price, greeks, simulate,
/// converge, compare-leland. Global flags: --config, --seed, --threads,
/// --out. Returns the process exit code instead of calling exit(), so tests
/// can drive the full stack in process.
inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
    CLI::App app{"Monte Carlo laboratory for conservative delta hedging "
                 "under transaction costs"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> out_override;
    unsigned threads = 1;

    const auto add_globals = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON experiment config")
            ->required();
        sub->add_option("--seed", seed_override, "override run.master_seed");
        sub->add_option("--threads", threads,
                        "worker threads (affects speed only, never results)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--out", out_override, "override output.directory");
    };
    add_globals(app.add_subcommand("price", "price a payoff at one point"));
    add_globals(app.add_subcommand("greeks", "sensitivities and PDE residuals"));
    add_globals(app.add_subcommand("simulate", "hedge one strategy over paths"));
    add_globals(app.add_subcommand("converge", "kappa-ladder limit statistics"));
    add_globals(
        app.add_subcommand("compare-leland", "equidistant vs hitting-time"));

    // CLI11 consumes the argument vector in reverse order, program name
    // excluded.
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        out << (subs.empty() ? app.help() : subs.front()->help());
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_invalid;
    }

    try {
        ExperimentConfig cfg = parse_config(detail_cli::slurp(config_path));
        if (seed_override) {
            cfg.run.master_seed = *seed_override;
            cfg.resolved["run"]["master_seed"] = *seed_override;
        }
        if (out_override) {
            cfg.output.directory = *out_override;
            cfg.resolved["output"]["directory"] = *out_override;
        }

        const CLI::App* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        if (name == "price" || name == "greeks")
            return cmd_point_report(cfg, name, out);
        if (name == "simulate") return cmd_simulate(cfg, threads, out);
        if (name == "converge") return cmd_converge(cfg, threads, out);
        return cmd_compare_leland(cfg, threads, out);
    } catch (const invalid_input& e) {
        err << "error: " << e.what() << "\n";
        return exit_invalid;
    } catch (const numeric_failure& e) {
        err << "numeric failure: " << e.what() << "\n";
        return exit_numeric;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return exit_numeric;
    }
}

} // namespace hedgelab::cli
