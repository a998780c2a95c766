#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <string>

#include "hedgelab/config.hpp"
#include "hedgelab/report.hpp"

using namespace hedgelab;

namespace {

/// Parse failure message, or "" when parsing succeeded.
std::string parse_error(const std::string& text) {
    try {
        parse_config(text);
        return "";
    } catch (const invalid_input& e) {
        return e.what();
    }
}

bool mentions(const std::string& msg, const std::string& needle) {
    return msg.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("minimal config parses with defaults filled and echoed", "[config]") {
    const ExperimentConfig cfg = parse_config(R"({
        "model": {"type": "black_scholes", "sigma": 0.2},
        "payoff": {"kind": "call", "strike": 100.0},
        "strategy": {"kind": "hitting_time", "sigma_hat_sq": 0.04, "kappa": 0.01},
        "grid": {"steps": 1000},
        "run": {"paths": 10, "master_seed": 7}
    })");

    REQUIRE(cfg.model.has_value());
    CHECK(cfg.model->variant == ModelSpec::Variant::black_scholes);
    CHECK(cfg.model->sigma == 0.2);
    CHECK(cfg.model->r == 0.0);       // default
    CHECK(cfg.model->s1_init == 100.0); // default
    REQUIRE(cfg.payoff.has_value());
    CHECK(cfg.payoff->is_vanilla());
    CHECK(cfg.payoff->convexity() == Convexity::convex);
    REQUIRE(cfg.strategy.has_value());
    CHECK(cfg.strategy->alpha == 2.0); // default
    CHECK(cfg.strategy->charge_switch_cost);
    CHECK(cfg.strategy->resolution_floor == 20);
    CHECK(cfg.grid.horizon == 1.0);
    CHECK(cfg.grid.steps == 1000);
    CHECK(cfg.grid.refine_factor == 1);
    CHECK(cfg.run.paths == 10);
    CHECK(cfg.run.master_seed == 7);
    CHECK_FALSE(cfg.output.present); // absent section keeps defaults
    CHECK(cfg.output.csv);
    CHECK(cfg.output.json);

    // Defaults are visible in the resolved echo, not only in the struct.
    const nlohmann::json& r = cfg.resolved;
    CHECK(r["model"]["s1_init"] == 100.0);
    CHECK(r["model"]["rate"] == 0.0);
    CHECK(r["payoff"]["convexity"] == "convex");
    CHECK(r["strategy"]["alpha"] == 2.0);
    CHECK(r["strategy"]["charge_switch_cost"] == true);
    CHECK(r["strategy"]["resolution_floor"] == 20);
    CHECK(r["grid"]["horizon"] == 1.0);
    CHECK(r["run"]["master_seed"] == 7);
    CHECK_FALSE(r.contains("output"));
}

TEST_CASE("all validation errors are reported together", "[config]") {
    const std::string msg = parse_error(R"({
        "model": {"type": "black_scholes", "sigma": 0.2, "vol": 0.3},
        "payoff": {"kind": "butterfly"},
        "strategy": {"kappa": -0.01, "alpha": 0.0},
        "grid": {"steps": 0},
        "run": {"paths": 0},
        "notes": {}
    })");
    REQUIRE_FALSE(msg.empty());
    CHECK(mentions(msg, "model.vol"));      // unknown key
    CHECK(mentions(msg, "payoff.kind"));    // bad enum
    CHECK(mentions(msg, "strategy.kappa")); // negative
    CHECK(mentions(msg, "strategy.alpha")); // nonpositive
    CHECK(mentions(msg, "grid.steps"));
    CHECK(mentions(msg, "run.paths"));
    CHECK(mentions(msg, "notes"));          // unknown section
    CHECK(mentions(msg, "7 errors"));
}

TEST_CASE("concave payoff with small alpha is rejected with the rule", "[config]") {
    const std::string msg = parse_error(R"({
        "payoff": {"kind": "call", "strike": 100.0, "convexity": "concave"},
        "strategy": {"kind": "hitting_time", "sigma_hat_sq": 0.04,
                     "alpha": 1.5, "kappa": 0.01}
    })");
    REQUIRE_FALSE(msg.empty());
    CHECK(mentions(msg, "strategy.alpha"));
    CHECK(mentions(msg, "alpha > 2"));

    // alpha just above the bound passes.
    CHECK(parse_error(R"({
        "payoff": {"kind": "call", "strike": 100.0, "convexity": "concave"},
        "strategy": {"kind": "hitting_time", "sigma_hat_sq": 0.04,
                     "alpha": 2.5, "kappa": 0.01}
    })")
              .empty());

    // The bound binds the hitting strategy, not the costless one.
    CHECK(parse_error(R"({
        "payoff": {"kind": "call", "strike": 100.0, "convexity": "concave"},
        "strategy": {"kind": "continuous", "sigma_hat_sq": 0.04}
    })")
              .empty());
}

TEST_CASE("negative kappa is rejected", "[config]") {
    const std::string msg = parse_error(R"({
        "strategy": {"kind": "hitting_time", "sigma_hat_sq": 0.04, "kappa": -1.0}
    })");
    REQUIRE(mentions(msg, "strategy.kappa"));
    REQUIRE(mentions(msg, "nonnegative"));
}

TEST_CASE("malformed JSON and wrong types are rejected", "[config]") {
    CHECK(mentions(parse_error("not json at all"), "not valid JSON"));
    CHECK(mentions(parse_error("[1, 2]"), "top level must be an object"));
    CHECK(mentions(parse_error(R"({"model": 3})"), "expected an object"));
    CHECK(mentions(parse_error(R"({"grid": {"steps": "many"}})"),
                   "grid.steps"));
    CHECK(mentions(parse_error(R"({"grid": {"steps": -5}})"), "grid.steps"));
    CHECK(mentions(parse_error(R"({"output": {"formats": {"csv": "yes"}}})"),
                   "output.formats.csv"));
    CHECK(mentions(parse_error(R"({"run": {"kappa_ladder": [0.01, "x"]}})"),
                   "run.kappa_ladder"));
}

TEST_CASE("piecewise payoff spec round trip and concave negation", "[config]") {
    const ExperimentConfig cfg = parse_config(R"({
        "payoff": {"kind": "piecewise_linear",
                   "knots": [[90.0, 0.0], [110.0, 0.0]],
                   "slope_left": -1.0, "slope_right": 1.0,
                   "convexity": "concave"}
    })");
    REQUIRE(cfg.payoff.has_value());
    CHECK(cfg.payoff->convexity() == Convexity::concave);
    // Negated strangle: value -(K1 - s)^+ - (s - K2)^+.
    CHECK(cfg.payoff->eval(80.0) == Catch::Approx(-10.0));
    CHECK(cfg.payoff->eval(100.0) == Catch::Approx(0.0));
    CHECK(cfg.payoff->eval(125.0) == Catch::Approx(-15.0));
    CHECK(cfg.resolved["payoff"]["knots"][1][0] == 110.0);

    const std::string bad = parse_error(R"({
        "payoff": {"kind": "piecewise_linear",
                   "knots": [[90.0, 0.0], [110.0]],
                   "slope_left": -1.0, "slope_right": 1.0}
    })");
    CHECK(mentions(bad, "payoff.knots"));

    // Non-monotone slopes (up, flat, down) are neither convex nor concave and
    // surface through the payoff constructor.
    const std::string msg = parse_error(R"({
        "payoff": {"kind": "piecewise_linear",
                   "knots": [[90.0, 0.0], [110.0, 20.0]],
                   "slope_left": 0.0, "slope_right": -1.0}
    })");
    REQUIRE_FALSE(msg.empty());
    CHECK(mentions(msg, "monotone"));
}

TEST_CASE("point section validation", "[config]") {
    CHECK(mentions(parse_error(R"({"point": {"spot": -5.0, "variance": 0.04}})"),
                   "point"));
    CHECK(mentions(parse_error(R"({"point": {"spot": 100.0, "variance": 0.0}})"),
                   "positive"));
    CHECK(mentions(parse_error(R"({"point": {"variance": 0.04}})"), "point.spot"));
}

TEST_CASE("ladder and checkpoint field checks", "[config]") {
    CHECK(mentions(parse_error(R"({"run": {"kappa_ladder": [0.01, 0.02]}})"),
                   "strictly decreasing"));
    CHECK(mentions(parse_error(R"({"run": {"kappa_ladder": [0.01, -0.02]}})"),
                   "positive"));
    CHECK(mentions(parse_error(R"({"run": {"n_ladder": [10, 0]}})"), "n_ladder"));
    CHECK(parse_error(R"({"run": {"n_ladder": [250, 1000]}})").empty());
}

TEST_CASE("strict schema rejects unknown keys in nested sections", "[config]") {
    CHECK(mentions(parse_error(R"({
        "model": {"type": "stoch_vol", "sv": {"v0": 0.04, "vvol": 0.3}}
    })"),
                   "model.sv.vvol"));
    CHECK(mentions(parse_error(R"({
        "output": {"directory": "x", "formats": {"csv": true, "xml": true}}
    })"),
                   "output.formats.xml"));
    CHECK(mentions(parse_error(R"({
        "payoff": {"kind": "call", "strike": 100.0, "norm": 2}
    })"),
                   "payoff.norm"));
}

TEST_CASE("model variants parse into validated specs", "[config]") {
    const ExperimentConfig td = parse_config(R"({
        "model": {"type": "time_dependent", "rate": 0.01,
                  "curve": {"shape": "piecewise_constant",
                            "times": [0.0, 0.5], "values": [0.2, 0.3]}}
    })");
    REQUIRE(td.model.has_value());
    CHECK(td.model->variant == ModelSpec::Variant::time_dependent);
    CHECK(td.model->curve.variance_at(0.75) == Catch::Approx(0.09));

    const ExperimentConfig sv = parse_config(R"({
        "model": {"type": "stoch_vol",
                  "sv": {"v0": 0.09, "vol_of_vol": 0.4, "rho": -0.7}}
    })");
    REQUIRE(sv.model.has_value());
    CHECK(sv.model->sv.v0 == 0.09);
    CHECK(sv.model->sv.rho == -0.7);
    CHECK(sv.model->sv.speed == 1.0); // default survives partial spec
    CHECK(sv.resolved["model"]["sv"]["long_run_var"] == 0.04);

    CHECK(mentions(parse_error(R"({
        "model": {"type": "time_dependent",
                  "curve": {"shape": "piecewise_constant",
                            "times": [0.5, 1.0], "values": [0.2, 0.3]}}
    })"),
                   "times must start at 0"));
    CHECK(mentions(parse_error(R"({"model": {"type": "garch"}})"), "model.type"));
}

TEST_CASE("leland strategy with concave payoff is rejected", "[config]") {
    const std::string msg = parse_error(R"({
        "payoff": {"kind": "call", "strike": 100.0, "convexity": "concave"},
        "strategy": {"kind": "leland", "kappa": 0.01, "leland_n": 10}
    })");
    REQUIRE(mentions(msg, "convex"));
}

TEST_CASE("decimal rendering round-trips doubles", "[config]") {
    const double values[] = {0.1,
                             1.0 / 3.0,
                             3.141592653589793,
                             7.96556745540579,
                             1e300,
                             -2.2250738585072014e-308,
                             0.0,
                             123456789.123456789};
    for (double v : values) {
        const std::string s = report::fmt17(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(report::fmt17(1.5) == "1.5");
}

TEST_CASE("csv builder enforces row arity", "[config]") {
    report::CsvBuilder csv({"a", "b"});
    csv.cell(1.0).cell(std::size_t{2});
    csv.end_row();
    csv.cell(3.5);
    CHECK_THROWS_AS(csv.end_row(), numeric_failure);
}
