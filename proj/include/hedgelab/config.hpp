#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hedgelab/errors.hpp"
#include "hedgelab/hedging.hpp"
#include "hedgelab/market.hpp"
#include "hedgelab/payoff.hpp"
#include "hedgelab/pricing.hpp"

namespace hedgelab {

/// Experiment configuration, parsed from a strict JSON schema. Sections:
///
///   "model"    {"type": "black_scholes" | "time_dependent" | "stoch_vol",
///               "s1_init": 100.0, "rate": 0.0,
///               "sigma": 0.2,                      black_scholes
///               "curve": {"shape": "piecewise_constant", "times": [...],
///                         "values": [...]}  or
///                        {"shape": "exp_decay", "v0":, "theta":, "speed":},
///               "sv": {"v0":, "speed":, "long_run_var":, "vol_of_vol":,
///                      "rho":}}                    stoch_vol
///   "payoff"   {"kind": "call" | "put" | "piecewise_linear" | "smooth",
///               "strike":,                         call / put
///               "knots": [[spot, value], ...],
///               "slope_left":, "slope_right":,     piecewise_linear
///               "form": "power" | "log_contract" | "entropy",
///               "exponent":,                       smooth
///               "convexity": "convex" | "concave"}
///   "point"    {"spot":, "rate_accum": 0.0, "variance":}    price / greeks
///   "strategy" {"kind": "hitting_time" | "continuous" | "leland",
///               "sigma_hat_sq":, "alpha": 2.0, "kappa":,
///               "charge_switch_cost": true, "resolution_floor": 20,
///               "leland_n":}
///   "grid"     {"horizon": 1.0, "steps":, "refine_factor": 1,
///               "steps_per_date": 400}
///   "run"      {"paths":, "master_seed":, "kappa_ladder": [...] or
///               "n_ladder": [...], "checkpoints": [...]}
///   "output"   {"directory": "", "formats": {"csv": true, "json": true},
///               "dump_paths": 0}
///
/// Unknown keys anywhere are errors; validation reports every problem found,
/// not just the first. Each subcommand requires only the sections it uses;
/// extra valid sections are allowed so one file can drive several commands.
/// The resolved values, defaults included, are echoed into every JSON report.
struct ExperimentConfig {
    struct Grid {
        bool present = false;
        double horizon = 1.0;
        std::size_t steps = 0; // no default; required by simulate / converge
        std::size_t refine_factor = 1;
        std::size_t steps_per_date = 400; // grid steps per date, compare-leland
    };
    struct Run {
        bool present = false;
        std::size_t paths = 0;
        std::uint64_t master_seed = 0;
        std::vector<double> kappa_ladder;   // converge
        std::vector<std::size_t> n_ladder;  // compare-leland
        std::vector<double> checkpoints;    // converge
    };
    struct Output {
        bool present = false;
        std::string directory;
        bool csv = true;
        bool json = true;
        std::size_t dump_paths = 0; // debug: dump the first N simulated paths
    };

    std::optional<ModelSpec> model;
    std::optional<Payoff> payoff;
    std::optional<PricingInputs> point;
    std::optional<StrategyConfig> strategy;
    Grid grid;
    Run run;
    Output output;

    nlohmann::json resolved; // defaults filled; embedded in reports
};

namespace detail {

/// Error accumulator: schema problems are collected across the whole file and
/// reported together, so a bad config surfaces every fix in one pass.
class SchemaErrors {
public:
    void add(const std::string& where, const std::string& what) {
        items_.push_back(where + ": " + what);
    }

    bool empty() const { return items_.empty(); }

    [[noreturn]] void raise() const {
        std::string msg = "config: " + std::to_string(items_.size()) +
                          (items_.size() == 1 ? " error" : " errors");
        for (const auto& e : items_) msg += "\n  - " + e;
        throw invalid_input(msg);
    }

private:
    std::vector<std::string> items_;
};

/// Typed accessor for one JSON object. Reads mark keys as consumed;
/// finish() rejects whatever was never consumed (strict schema). Type or
/// range mismatches record an error and fall back to the supplied default so
/// parsing can continue collecting.
class Section {
public:
    Section(const nlohmann::json& obj, std::string name, SchemaErrors& errs)
        : obj_(&obj), name_(std::move(name)), errs_(&errs) {}

    bool has(const std::string& key) const { return obj_->contains(key); }

    double number(const std::string& key, double fallback) {
        seen_.insert(key);
        const auto it = obj_->find(key);
        if (it == obj_->end()) {
            errs_->add(where(key), "required number is missing");
            return fallback;
        }
        return as_number(*it, key, fallback);
    }

    double number_or(const std::string& key, double def) {
        seen_.insert(key);
        const auto it = obj_->find(key);
        if (it == obj_->end()) return def;
        return as_number(*it, key, def);
    }

    std::size_t count(const std::string& key, std::size_t fallback) {
        seen_.insert(key);
        const auto it = obj_->find(key);
        if (it == obj_->end()) {
            errs_->add(where(key), "required integer is missing");
            return fallback;
        }
        return as_count(*it, key, fallback);
    }

    std::size_t count_or(const std::string& key, std::size_t def) {
        seen_.insert(key);
        const auto it = obj_->find(key);
        if (it == obj_->end()) return def;
        return as_count(*it, key, def);
    }

    std::uint64_t seed_or(const std::string& key, std::uint64_t def) {
        seen_.insert(key);
        const auto it = obj_->find(key);
        if (it == obj_->end()) return def;
        if (it->is_number_unsigned()) return it->get<std::uint64_t>();
        if (it->is_number_integer() && it->get<std::int64_t>() >= 0)
            return static_cast<std::uint64_t>(it->get<std::int64_t>());
        errs_->add(where(key), "expected a nonnegative integer");
        return def;
    }

    bool flag_or(const std::string& key, bool def) {
        seen_.insert(key);
        const auto it = obj_->find(key);
        if (it == obj_->end()) return def;
        if (!it->is_boolean()) {
            errs_->add(where(key), "expected true or false");
            return def;
        }
        return it->get<bool>();
    }

    std::string word(const std::string& key, const std::string& fallback) {
        seen_.insert(key);
        const auto it = obj_->find(key);
        if (it == obj_->end()) {
            errs_->add(where(key), "required string is missing");
            return fallback;
        }
        if (!it->is_string()) {
            errs_->add(where(key), "expected a string");
            return fallback;
        }
        return it->get<std::string>();
    }

    std::string word_or(const std::string& key, const std::string& def) {
        seen_.insert(key);
        const auto it = obj_->find(key);
        if (it == obj_->end()) return def;
        if (!it->is_string()) {
            errs_->add(where(key), "expected a string");
            return def;
        }
        return it->get<std::string>();
    }

    std::vector<double> numbers(const std::string& key) {
        seen_.insert(key);
        std::vector<double> out;
        const auto it = obj_->find(key);
        if (it == obj_->end()) return out;
        if (!it->is_array()) {
            errs_->add(where(key), "expected an array of numbers");
            return out;
        }
        for (const auto& v : *it) {
            if (!v.is_number()) {
                errs_->add(where(key), "expected an array of numbers");
                out.clear();
                return out;
            }
            out.push_back(v.get<double>());
        }
        return out;
    }

    std::vector<std::size_t> counts(const std::string& key) {
        seen_.insert(key);
        std::vector<std::size_t> out;
        const auto it = obj_->find(key);
        if (it == obj_->end()) return out;
        if (!it->is_array()) {
            errs_->add(where(key), "expected an array of nonnegative integers");
            return out;
        }
        for (const auto& v : *it) {
            if (!v.is_number_integer() ||
                (v.is_number_integer() && !v.is_number_unsigned() &&
                 v.get<std::int64_t>() < 0)) {
                errs_->add(where(key), "expected an array of nonnegative integers");
                out.clear();
                return out;
            }
            out.push_back(static_cast<std::size_t>(v.get<std::uint64_t>()));
        }
        return out;
    }

    std::vector<std::pair<double, double>> knot_pairs(const std::string& key) {
        seen_.insert(key);
        std::vector<std::pair<double, double>> out;
        const auto it = obj_->find(key);
        if (it == obj_->end()) {
            errs_->add(where(key), "required array of [spot, value] pairs is missing");
            return out;
        }
        if (!it->is_array()) {
            errs_->add(where(key), "expected an array of [spot, value] pairs");
            return out;
        }
        for (const auto& v : *it) {
            if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
                errs_->add(where(key), "expected an array of [spot, value] pairs");
                out.clear();
                return out;
            }
            out.emplace_back(v[0].get<double>(), v[1].get<double>());
        }
        return out;
    }

    const nlohmann::json* object(const std::string& key) {
        seen_.insert(key);
        const auto it = obj_->find(key);
        if (it == obj_->end()) return nullptr;
        if (!it->is_object()) {
            errs_->add(where(key), "expected an object");
            return nullptr;
        }
        return &*it;
    }

    void finish() {
        for (const auto& item : obj_->items())
            if (!seen_.count(item.key()))
                errs_->add(where(item.key()), "unknown key (strict schema)");
    }

private:
    std::string where(const std::string& key) const { return name_ + "." + key; }

    double as_number(const nlohmann::json& v, const std::string& key, double fallback) {
        if (!v.is_number()) {
            errs_->add(where(key), "expected a number");
            return fallback;
        }
        return v.get<double>();
    }

    std::size_t as_count(const nlohmann::json& v, const std::string& key,
                         std::size_t fallback) {
        if (v.is_number_unsigned()) return static_cast<std::size_t>(v.get<std::uint64_t>());
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
            return static_cast<std::size_t>(v.get<std::int64_t>());
        errs_->add(where(key), "expected a nonnegative integer");
        return fallback;
    }

    const nlohmann::json* obj_;
    std::string name_;
    SchemaErrors* errs_;
    std::set<std::string> seen_;
};

inline void parse_model(const nlohmann::json& node, ExperimentConfig& cfg,
                        SchemaErrors& errs) {
    Section s(node, "model", errs);
    const std::string type = s.word("type", "black_scholes");
    const double s1_init = s.number_or("s1_init", 100.0);
    const double rate = s.number_or("rate", 0.0);
    nlohmann::json& echo = cfg.resolved["model"];
    echo["type"] = type;
    echo["s1_init"] = s1_init;
    echo["rate"] = rate;

    try {
        if (type == "black_scholes") {
            const double sigma = s.number("sigma", 0.2);
            echo["sigma"] = sigma;
            s.finish();
            if (errs.empty()) cfg.model = ModelSpec::black_scholes(sigma, rate, s1_init);
        } else if (type == "time_dependent") {
            const nlohmann::json* cnode = s.object("curve");
            s.finish();
            if (!cnode) {
                errs.add("model.curve", "required object is missing");
                return;
            }
            Section c(*cnode, "model.curve", errs);
            const std::string shape = c.word("shape", "piecewise_constant");
            SigmaSpec curve;
            nlohmann::json& cecho = echo["curve"];
            cecho["shape"] = shape;
            if (shape == "piecewise_constant") {
                const auto times = c.numbers("times");
                const auto values = c.numbers("values");
                cecho["times"] = times;
                cecho["values"] = values;
                c.finish();
                if (!errs.empty()) return;
                curve = SigmaSpec::piecewise_constant(times, values);
            } else if (shape == "exp_decay") {
                const double v0 = c.number("v0", 0.04);
                const double theta = c.number("theta", 0.04);
                const double speed = c.number("speed", 1.0);
                cecho["v0"] = v0;
                cecho["theta"] = theta;
                cecho["speed"] = speed;
                c.finish();
                if (!errs.empty()) return;
                curve = SigmaSpec::exp_decay(v0, theta, speed);
            } else {
                errs.add("model.curve.shape",
                         "expected \"piecewise_constant\" or \"exp_decay\"");
                return;
            }
            cfg.model = ModelSpec::time_dependent(std::move(curve), rate, s1_init);
        } else if (type == "stoch_vol") {
            const nlohmann::json* vnode = s.object("sv");
            s.finish();
            StochVolParams sv;
            nlohmann::json& vecho = echo["sv"];
            if (vnode) {
                Section v(*vnode, "model.sv", errs);
                sv.v0 = v.number_or("v0", sv.v0);
                sv.speed = v.number_or("speed", sv.speed);
                sv.long_run_var = v.number_or("long_run_var", sv.long_run_var);
                sv.vol_of_vol = v.number_or("vol_of_vol", sv.vol_of_vol);
                sv.rho = v.number_or("rho", sv.rho);
                v.finish();
            }
            vecho["v0"] = sv.v0;
            vecho["speed"] = sv.speed;
            vecho["long_run_var"] = sv.long_run_var;
            vecho["vol_of_vol"] = sv.vol_of_vol;
            vecho["rho"] = sv.rho;
            if (!errs.empty()) return;
            cfg.model = ModelSpec::stoch_vol(sv, rate, s1_init);
        } else {
            errs.add("model.type",
                     "expected \"black_scholes\", \"time_dependent\", or \"stoch_vol\"");
            s.finish();
        }
    } catch (const invalid_input& e) {
        errs.add("model", e.what());
    }
}

inline void parse_payoff(const nlohmann::json& node, ExperimentConfig& cfg,
                         SchemaErrors& errs) {
    Section s(node, "payoff", errs);
    const std::string kind = s.word("kind", "call");
    const std::string convexity = s.word_or("convexity", "convex");
    nlohmann::json& echo = cfg.resolved["payoff"];
    echo["kind"] = kind;
    echo["convexity"] = convexity;
    if (convexity != "convex" && convexity != "concave")
        errs.add("payoff.convexity", "expected \"convex\" or \"concave\"");

    std::optional<Payoff> built;
    try {
        if (kind == "call" || kind == "put") {
            const double strike = s.number("strike", 100.0);
            echo["strike"] = strike;
            s.finish();
            if (errs.empty())
                built = kind == "call" ? Payoff::call(strike) : Payoff::put(strike);
        } else if (kind == "piecewise_linear") {
            const auto knots = s.knot_pairs("knots");
            const double sl = s.number("slope_left", 0.0);
            const double sr = s.number("slope_right", 1.0);
            echo["knots"] = knots;
            echo["slope_left"] = sl;
            echo["slope_right"] = sr;
            s.finish();
            if (errs.empty()) built = Payoff::piecewise_linear(knots, sl, sr);
        } else if (kind == "smooth") {
            const std::string form = s.word("form", "power");
            const double exponent = s.number_or("exponent", 2.0);
            echo["form"] = form;
            echo["exponent"] = exponent;
            s.finish();
            Payoff::SmoothForm sf = Payoff::SmoothForm::power;
            if (form == "power") {
                sf = Payoff::SmoothForm::power;
            } else if (form == "log_contract") {
                sf = Payoff::SmoothForm::log_contract;
            } else if (form == "entropy") {
                sf = Payoff::SmoothForm::entropy;
            } else {
                errs.add("payoff.form",
                         "expected \"power\", \"log_contract\", or \"entropy\"");
            }
            if (errs.empty()) built = Payoff::smooth(sf, exponent);
        } else {
            errs.add("payoff.kind",
                     "expected \"call\", \"put\", \"piecewise_linear\", or \"smooth\"");
            s.finish();
        }
    } catch (const invalid_input& e) {
        errs.add("payoff", e.what());
    }

    if (built && convexity == "concave") built = built->negated();
    if (errs.empty()) cfg.payoff = std::move(built);
}

inline void parse_point(const nlohmann::json& node, ExperimentConfig& cfg,
                        SchemaErrors& errs) {
    Section s(node, "point", errs);
    PricingInputs in;
    in.S = s.number("spot", 100.0);
    in.R = s.number_or("rate_accum", 0.0);
    in.Sigma = s.number("variance", 0.04);
    s.finish();
    nlohmann::json& echo = cfg.resolved["point"];
    echo["spot"] = in.S;
    echo["rate_accum"] = in.R;
    echo["variance"] = in.Sigma;
    try {
        in.validate();
        if (!(in.Sigma > 0.0))
            throw invalid_input("point.variance must be positive");
        if (errs.empty()) cfg.point = in;
    } catch (const invalid_input& e) {
        errs.add("point", e.what());
    }
}

inline void parse_strategy(const nlohmann::json& node, ExperimentConfig& cfg,
                           SchemaErrors& errs) {
    Section s(node, "strategy", errs);
    StrategyConfig sc;
    const std::string kind = s.word_or("kind", "hitting_time");
    if (kind == "hitting_time") {
        sc.kind = StrategyKind::hitting_time;
    } else if (kind == "continuous") {
        sc.kind = StrategyKind::continuous;
    } else if (kind == "leland") {
        sc.kind = StrategyKind::leland;
    } else {
        errs.add("strategy.kind",
                 "expected \"hitting_time\", \"continuous\", or \"leland\"");
    }
    sc.sigma_hat_sq = s.number_or("sigma_hat_sq", 0.0);
    sc.alpha = s.number_or("alpha", 2.0);
    sc.kappa = s.number_or("kappa", 0.0);
    sc.charge_switch_cost = s.flag_or("charge_switch_cost", true);
    sc.resolution_floor = s.count_or("resolution_floor", 20);
    sc.leland_n = s.count_or("leland_n", 0);
    s.finish();

    nlohmann::json& echo = cfg.resolved["strategy"];
    echo["kind"] = kind;
    if (s.has("sigma_hat_sq") || sc.kind != StrategyKind::leland)
        echo["sigma_hat_sq"] = sc.sigma_hat_sq;
    echo["alpha"] = sc.alpha;
    echo["kappa"] = sc.kappa;
    echo["charge_switch_cost"] = sc.charge_switch_cost;
    echo["resolution_floor"] = sc.resolution_floor;
    if (sc.leland_n > 0) echo["leland_n"] = sc.leland_n;

    // Field-level checks only; whole-strategy validation depends on the
    // payoff and on which command runs, and happens after all sections parse.
    if (!(sc.kappa >= 0.0) || !std::isfinite(sc.kappa))
        errs.add("strategy.kappa", "must be a nonnegative finite number");
    if (!(sc.alpha > 0.0) || !std::isfinite(sc.alpha))
        errs.add("strategy.alpha", "must be a positive finite number");
    if (s.has("sigma_hat_sq") && !(sc.sigma_hat_sq > 0.0))
        errs.add("strategy.sigma_hat_sq", "must be positive");
    if (errs.empty()) cfg.strategy = sc;
}

inline void parse_grid(const nlohmann::json& node, ExperimentConfig& cfg,
                       SchemaErrors& errs) {
    Section s(node, "grid", errs);
    ExperimentConfig::Grid& g = cfg.grid;
    g.present = true;
    g.horizon = s.number_or("horizon", 1.0);
    g.steps = s.count_or("steps", 0);
    g.refine_factor = s.count_or("refine_factor", 1);
    g.steps_per_date = s.count_or("steps_per_date", 400);
    s.finish();
    if (!(g.horizon > 0.0)) errs.add("grid.horizon", "must be positive");
    if (s.has("steps") && g.steps == 0) errs.add("grid.steps", "must be positive");
    if (g.refine_factor == 0) errs.add("grid.refine_factor", "must be positive");
    if (g.steps_per_date == 0) errs.add("grid.steps_per_date", "must be positive");

    nlohmann::json& echo = cfg.resolved["grid"];
    echo["horizon"] = g.horizon;
    if (g.steps > 0) echo["steps"] = g.steps;
    echo["refine_factor"] = g.refine_factor;
    echo["steps_per_date"] = g.steps_per_date;
}

inline void parse_run(const nlohmann::json& node, ExperimentConfig& cfg,
                      SchemaErrors& errs) {
    Section s(node, "run", errs);
    ExperimentConfig::Run& r = cfg.run;
    r.present = true;
    r.paths = s.count_or("paths", 0);
    r.master_seed = s.seed_or("master_seed", 0);
    r.kappa_ladder = s.numbers("kappa_ladder");
    r.n_ladder = s.counts("n_ladder");
    r.checkpoints = s.numbers("checkpoints");
    s.finish();
    if (s.has("paths") && r.paths == 0) errs.add("run.paths", "must be positive");
    for (double k : r.kappa_ladder)
        if (!(k > 0.0)) {
            errs.add("run.kappa_ladder", "entries must be positive");
            break;
        }
    for (std::size_t i = 0; i + 1 < r.kappa_ladder.size(); ++i)
        if (!(r.kappa_ladder[i] > r.kappa_ladder[i + 1])) {
            errs.add("run.kappa_ladder", "must be strictly decreasing");
            break;
        }
    for (std::size_t n : r.n_ladder)
        if (n == 0) {
            errs.add("run.n_ladder", "entries must be positive");
            break;
        }

    nlohmann::json& echo = cfg.resolved["run"];
    if (s.has("paths")) echo["paths"] = r.paths;
    echo["master_seed"] = r.master_seed;
    if (!r.kappa_ladder.empty()) echo["kappa_ladder"] = r.kappa_ladder;
    if (!r.n_ladder.empty()) echo["n_ladder"] = r.n_ladder;
    if (!r.checkpoints.empty()) echo["checkpoints"] = r.checkpoints;
}

inline void parse_output(const nlohmann::json& node, ExperimentConfig& cfg,
                         SchemaErrors& errs) {
    Section s(node, "output", errs);
    ExperimentConfig::Output& o = cfg.output;
    o.present = true;
    o.directory = s.word_or("directory", "");
    const nlohmann::json* fnode = s.object("formats");
    if (fnode) {
        Section f(*fnode, "output.formats", errs);
        o.csv = f.flag_or("csv", true);
        o.json = f.flag_or("json", true);
        f.finish();
    }
    o.dump_paths = s.count_or("dump_paths", 0);
    s.finish();

    nlohmann::json& echo = cfg.resolved["output"];
    echo["directory"] = o.directory;
    echo["formats"]["csv"] = o.csv;
    echo["formats"]["json"] = o.json;
    echo["dump_paths"] = o.dump_paths;
}

} // namespace detail

/// Parses and validates the JSON experiment configuration. Every section
/// present in the file is validated whether or not the eventual command uses
/// it; all schema and constraint violations are reported together in one
/// invalid_input. Cross-section rules that can be checked without running
/// anything (the concave alpha bound) are checked here too.
inline ExperimentConfig parse_config(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw invalid_input(std::string("config: not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw invalid_input("config: top level must be an object");

    detail::SchemaErrors errs;
    ExperimentConfig cfg;
    cfg.resolved = nlohmann::json::object();

    static const std::set<std::string> known = {"model",    "payoff", "point",
                                                "strategy", "grid",   "run",
                                                "output"};
    for (const auto& item : root.items())
        if (!known.count(item.key()))
            errs.add(item.key(), "unknown section (strict schema)");

    if (root.contains("model")) {
        if (root["model"].is_object())
            detail::parse_model(root["model"], cfg, errs);
        else
            errs.add("model", "expected an object");
    }
    if (root.contains("payoff")) {
        if (root["payoff"].is_object())
            detail::parse_payoff(root["payoff"], cfg, errs);
        else
            errs.add("payoff", "expected an object");
    }
    if (root.contains("point")) {
        if (root["point"].is_object())
            detail::parse_point(root["point"], cfg, errs);
        else
            errs.add("point", "expected an object");
    }
    if (root.contains("strategy")) {
        if (root["strategy"].is_object())
            detail::parse_strategy(root["strategy"], cfg, errs);
        else
            errs.add("strategy", "expected an object");
    }
    if (root.contains("grid")) {
        if (root["grid"].is_object())
            detail::parse_grid(root["grid"], cfg, errs);
        else
            errs.add("grid", "expected an object");
    }
    if (root.contains("run")) {
        if (root["run"].is_object())
            detail::parse_run(root["run"], cfg, errs);
        else
            errs.add("run", "expected an object");
    }
    if (root.contains("output")) {
        if (root["output"].is_object())
            detail::parse_output(root["output"], cfg, errs);
        else
            errs.add("output", "expected an object");
    }

    // Cross-section rules checkable without running anything.
    if (cfg.strategy && cfg.payoff) {
        if (cfg.strategy->kind == StrategyKind::hitting_time &&
            cfg.payoff->convexity() == Convexity::concave &&
            !(cfg.strategy->alpha > 2.0))
            errs.add("strategy.alpha",
                     "concave payoffs require alpha > 2 "
                     "(shrunk variance must stay positive)");
        if (cfg.strategy->kind == StrategyKind::leland &&
            cfg.payoff->convexity() != Convexity::convex)
            errs.add("strategy.kind",
                     "the equidistant strategy requires a convex payoff");
    }

    if (!errs.empty()) errs.raise();
    return cfg;
}

} // namespace hedgelab
