#include <catch2/catch_amalgamated.hpp>

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hedgelab/asymptotics.hpp"
#include "hedgelab/market.hpp"

using namespace hedgelab;

namespace {

void require_same_raw(const ConvergenceReport& a, const ConvergenceReport& b) {
    REQUIRE(a.raw.seeds == b.raw.seeds);
    REQUIRE(a.raw.q == b.raw.q);
    REQUIRE(a.raw.stilde == b.raw.stilde);
    REQUIRE(a.raw.qv == b.raw.qv);
    REQUIRE(a.raw.z == b.raw.z);
    REQUIRE(a.raw.counts == b.raw.counts);
    REQUIRE(a.raw.alarms == b.raw.alarms);
    REQUIRE(a.cells.size() == b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        CHECK(a.cells[i].mean_z == b.cells[i].mean_z);
        CHECK(a.cells[i].var_z == b.cells[i].var_z);
        CHECK(a.cells[i].mse_ratio == b.cells[i].mse_ratio);
        CHECK(a.cells[i].ks_norm == b.cells[i].ks_norm);
        CHECK(a.cells[i].mean_k2n == b.cells[i].mean_k2n);
    }
}

} // namespace

TEST_CASE("path simulation is reproducible and seed-sensitive", "[determinism]") {
    StochVolParams sv;
    sv.v0 = 0.05;
    sv.long_run_var = 0.04;
    sv.speed = 2.0;
    sv.vol_of_vol = 0.4;
    sv.rho = -0.6;
    const std::vector<ModelSpec> models{
        ModelSpec::black_scholes(0.2, 0.03, 100.0),
        ModelSpec::stoch_vol(sv, 0.01, 100.0),
    };
    for (const ModelSpec& model : models) {
        const PathGrid a = simulate_path(model, 1.0, 512, 12345);
        const PathGrid b = simulate_path(model, 1.0, 512, 12345);
        REQUIRE(a.s1 == b.s1);
        REQUIRE(a.s0 == b.s0);
        REQUIRE(a.s_tilde == b.s_tilde);
        REQUIRE(a.log_stilde == b.log_stilde);
        REQUIRE(a.qv == b.qv);
        REQUIRE(a.times == b.times);

        const PathGrid c = simulate_path(model, 1.0, 512, 12346);
        CHECK(c.s_tilde.back() != a.s_tilde.back());
    }
}

TEST_CASE("grid refinement is reproducible", "[determinism]") {
    const ModelSpec model = ModelSpec::black_scholes(0.2, 0.02, 100.0);
    const PathGrid coarse = simulate_path(model, 1.0, 128, 99);
    const PathGrid f1 = refine_grid(model, coarse, 8, 4242);
    const PathGrid f2 = refine_grid(model, coarse, 8, 4242);
    REQUIRE(f1.s_tilde == f2.s_tilde);
    REQUIRE(f1.qv == f2.qv);
    const PathGrid f3 = refine_grid(model, coarse, 8, 4243);
    CHECK(f3.s_tilde != f1.s_tilde);
    // The refined path passes through the coarse knots.
    for (std::size_t i = 0; i <= coarse.n_steps(); ++i)
        REQUIRE(f1.s_tilde[i * 8] == coarse.s_tilde[i]);
}

TEST_CASE("convergence study is thread-count invariant", "[determinism]") {
    const ModelSpec model = ModelSpec::black_scholes(0.2, 0.0, 100.0);
    StrategyConfig base;
    base.sigma_hat_sq = 0.08;
    base.alpha = 2.0;
    const std::vector<double> ladder{0.02, 0.01};
    const std::vector<double> checkpoints{0.5, 1.0};

    SECTION("fused vanilla sweep") {
        const Payoff payoff = Payoff::call(100.0);
        const ConvergenceReport one =
            convergence_study(model, payoff, base, ladder, 60, checkpoints, 4711, 1.0, 800, 1);
        const ConvergenceReport three =
            convergence_study(model, payoff, base, ladder, 60, checkpoints, 4711, 1.0, 800, 3);
        require_same_raw(one, three);
    }

    SECTION("per-path engine route") {
        const Payoff strangle =
            Payoff::piecewise_linear({{90.0, 0.0}, {110.0, 0.0}}, -1.0, 1.0);
        const ConvergenceReport one =
            convergence_study(model, strangle, base, {0.02}, 30, {1.0}, 4713, 1.0, 600, 1);
        const ConvergenceReport three =
            convergence_study(model, strangle, base, {0.02}, 30, {1.0}, 4713, 1.0, 600, 3);
        require_same_raw(one, three);
    }

    SECTION("repeated identically") {
        const Payoff payoff = Payoff::call(100.0);
        const ConvergenceReport a =
            convergence_study(model, payoff, base, ladder, 40, checkpoints, 4717, 1.0, 500, 2);
        const ConvergenceReport b =
            convergence_study(model, payoff, base, ladder, 40, checkpoints, 4717, 1.0, 500, 2);
        require_same_raw(a, b);
    }
}

TEST_CASE("equidistant comparison is thread-count invariant", "[determinism]") {
    const Payoff payoff = Payoff::call(100.0);
    const LelandReport one = compare_leland(0.2, 0.15, {4, 8}, payoff, 30, 2025, 40, 1);
    const LelandReport two = compare_leland(0.2, 0.15, {4, 8}, payoff, 30, 2025, 40, 2);

    CHECK(one.gamma_integral == two.gamma_integral);
    REQUIRE(one.arms.size() == two.arms.size());
    for (std::size_t i = 0; i < one.arms.size(); ++i) {
        REQUIRE(one.arms[i].z_leland == two.arms[i].z_leland);
        REQUIRE(one.arms[i].z_hitting == two.arms[i].z_hitting);
        REQUIRE(one.arms[i].counts_hitting == two.arms[i].counts_hitting);
        CHECK(one.arms[i].mse_leland == two.arms[i].mse_leland);
        CHECK(one.arms[i].mse_hitting == two.arms[i].mse_hitting);
        CHECK(one.arms[i].se_ratio == two.arms[i].se_ratio);
    }
}

TEST_CASE("worker exceptions surface through the thread pool", "[determinism]") {
    StochVolParams sv;
    sv.v0 = 0.04;
    sv.long_run_var = 0.04;
    sv.speed = 1.5;
    sv.vol_of_vol = 0.3;
    const ModelSpec model = ModelSpec::stoch_vol(sv, 0.0, 100.0);
    const Payoff payoff = Payoff::call(100.0);
    StrategyConfig tight;
    tight.sigma_hat_sq = 0.005; // every path exhausts this before t = 0.5
    tight.alpha = 2.0;

    CHECK_THROWS_AS(
        convergence_study(model, payoff, tight, {0.02}, 24, {0.5}, 11, 1.0, 400, 3),
        invalid_input);
}
