#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "slowq/sim.hpp"
#include "slowq/solver.hpp"

using namespace slowq;

TEST_CASE("identical seeds give bit-identical estimates") {
    SimConfig cfg;
    cfg.params = params_from_loads(8, 8.0, 0.7, 0.95);
    cfg.horizon = 5000.0;
    cfg.seed = 42;
    cfg.replications = 3;
    const SimEstimates a = simulate(cfg);
    const SimEstimates b = simulate(cfg);
    CHECK(a.p_wait_hat == b.p_wait_hat);
    CHECK(a.mean_l_hat == b.mean_l_hat);
    CHECK(a.p_wait_halfwidth == b.p_wait_halfwidth);
    CHECK(a.busy.count == b.busy.count);
    CHECK(a.busy.max_length == b.busy.max_length);

    SimConfig other = cfg;
    other.seed = 43;
    CHECK(simulate(other).mean_l_hat != a.mean_l_hat);
}

TEST_CASE("starved system drains and stays empty") {
    SimConfig cfg;
    cfg.params.s = 5;
    cfg.params.lambda = 1e-12;  // effectively no arrivals
    cfg.params.mu_fast = 2.0;
    cfg.params.mu_slow = 1.0;
    cfg.params.rho_fast = cfg.params.lambda / (5 * 2.0);
    cfg.params.rho_slow = cfg.params.lambda / (5 * 1.0);
    cfg.horizon = 1000.0;
    cfg.initial_customers = 12;
    cfg.seed = 7;
    const auto path = simulate_path(cfg);
    long long prev = path.front().x;
    CHECK(prev == 12);
    for (const auto& pt : path) {
        CHECK(pt.x <= prev);  // monotone drain
        prev = pt.x;
    }
    CHECK(path.back().x == 0);
}

TEST_CASE("simulation brackets the exact delay probability") {
    const ModelParams p = params_from_loads(15, 15.0, 0.7, 0.98);
    const double exact = solve_stationary(p).p_wait();
    SimConfig cfg;
    cfg.params = p;
    cfg.horizon = 200000.0;
    cfg.seed = 20240601;
    cfg.replications = 4;
    const SimEstimates est = simulate(cfg);
    CHECK(std::abs(est.p_wait_hat - exact) <= 3.0 * est.p_wait_halfwidth);
}

TEST_CASE("confidence intervals cover the exact value") {
    const ModelParams p = params_from_loads(8, 8.0, 0.7, 0.9);
    const double exact = solve_stationary(p).p_wait();
    int covered = 0;
    const int runs = 100;
    for (int r = 0; r < runs; ++r) {
        SimConfig cfg;
        cfg.params = p;
        cfg.horizon = 20000.0;
        cfg.seed = 5000 + static_cast<std::uint64_t>(r);
        const SimEstimates est = simulate(cfg);
        if (std::abs(est.p_wait_hat - exact) <= 3.0 * est.p_wait_halfwidth) ++covered;
    }
    CHECK(covered >= 95);
}

TEST_CASE("long busy excursions appear under heavy slowdown") {
    const ModelParams p = params_from_loads(15, 15.0, 0.7, 0.98);
    double longest = 0.0;
    for (int seed = 1; seed <= 20; ++seed) {
        SimConfig cfg;
        cfg.params = p;
        cfg.horizon = 10000.0;
        cfg.warmup = 0.0;
        cfg.seed = static_cast<std::uint64_t>(seed);
        const SimEstimates est = simulate(cfg);
        longest = std::max(longest, est.busy.max_length);
    }
    CHECK(longest > 300.0);
}

TEST_CASE("sample path respects the state space") {
    SimConfig cfg;
    cfg.params = params_from_loads(6, 6.0, 0.75, 0.95);
    cfg.horizon = 2000.0;
    cfg.seed = 99;
    const auto path = simulate_path(cfg);
    REQUIRE(path.size() > 100);
    for (const auto& pt : path) {
        CHECK(pt.y >= 0);
        CHECK(pt.y <= std::min<long long>(pt.x, 6));
    }
    // consecutive points differ by one customer
    for (std::size_t k = 1; k < path.size(); ++k)
        CHECK(std::abs(path[k].x - path[k - 1].x) == 1);
}

TEST_CASE("coupled run never breaks the dominance ordering") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
        SimConfig cfg;
        cfg.params = params_from_loads(9, 9.0, 0.7, 0.95);
        cfg.customers = 100000;
        cfg.seed = seed;
        const CouplingReport rep = simulate_coupled(cfg);
        CHECK(rep.customers_checked == 100000);
        CHECK(rep.violations_ws_ge_w == 0);
        CHECK(rep.violations_w_ge_wf == 0);
        CHECK(rep.violations_xs_ge_x == 0);
        CHECK(rep.violations_x_ge_xf == 0);
        CHECK(rep.max_violation_magnitude == 0.0);
    }
}

TEST_CASE("coupling across a grid of loads") {
    const std::pair<double, double> loads[] = {
        {0.5, 0.8},  {0.55, 0.85}, {0.6, 0.9},   {0.65, 0.95}, {0.7, 0.99},
        {0.75, 0.9}, {0.8, 0.93},  {0.85, 0.96}, {0.9, 0.95},  {0.95, 0.99}};
    for (auto [rf, rs] : loads) {
        for (std::uint64_t seed : {31337ULL, 271828ULL, 314159ULL}) {
            SimConfig cfg;
            cfg.params = params_from_loads(12, 12.0, rf, rs);
            cfg.customers = 20000;
            cfg.seed = seed;
            const CouplingReport rep = simulate_coupled(cfg);
            CHECK(rep.violations_ws_ge_w + rep.violations_w_ge_wf +
                      rep.violations_xs_ge_x + rep.violations_x_ge_xf ==
                  0);
        }
    }
}

TEST_CASE("degenerate slowdown keeps the three paths together") {
    SimConfig cfg;
    const double mu = 1.0;
    cfg.params.s = 5;
    cfg.params.lambda = 4.0;
    cfg.params.mu_fast = mu * (1.0 + 1e-12);
    cfg.params.mu_slow = mu;
    cfg.params.rho_fast = cfg.params.lambda / (5 * cfg.params.mu_fast);
    cfg.params.rho_slow = cfg.params.lambda / (5 * mu);
    cfg.customers = 20000;
    cfg.seed = 8;
    const CouplingReport rep = simulate_coupled(cfg);
    CHECK(rep.violations_ws_ge_w == 0);
    CHECK(rep.violations_w_ge_wf == 0);
    // the three systems are the same up to 1e-12 service scaling, so no
    // dominance gap can exceed the accumulated rounding of one busy period
    CHECK(rep.max_violation_magnitude == 0.0);
}

TEST_CASE("invalid configurations are rejected") {
    SimConfig cfg;
    cfg.params = params_from_loads(3, 3.0, 0.5, 0.8);
    cfg.horizon = -1.0;
    CHECK_THROWS_AS(simulate(cfg), std::invalid_argument);
    cfg.horizon = 100.0;
    cfg.replications = 0;
    CHECK_THROWS_AS(simulate(cfg), std::invalid_argument);
}
