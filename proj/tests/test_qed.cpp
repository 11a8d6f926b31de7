#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "slowq/qed.hpp"
#include "slowq/rng.hpp"
#include "support/oracles.hpp"

using namespace slowq;

TEST_CASE("scaled parameters") {
    const QedParams q{0.5, 0.5, 1.0};
    const ModelParams p = scaled_params(q, 100);
    CHECK(p.lambda == doctest::Approx(95.0).epsilon(1e-14));
    CHECK(p.rho_slow == doctest::Approx(0.95).epsilon(1e-14));
    CHECK(p.mu_fast == doctest::Approx(1.05).epsilon(1e-14));

    SplitMix64 rng(5);
    for (int rep = 0; rep < 50; ++rep) {
        const QedParams qr{0.1 + 2.0 * rng.uniform01(), 0.1 + 2.0 * rng.uniform01(),
                           0.5 + rng.uniform01()};
        const int s = static_cast<int>(qr.beta * qr.beta) + 2 +
                      static_cast<int>(rng.next() % 400);
        const ModelParams pr = scaled_params(qr, s);
        CHECK(pr.rho_fast < pr.rho_slow);
        CHECK(pr.rho_slow < 1.0);
    }
    CHECK_THROWS_AS(scaled_params(QedParams{3.0, 0.5, 1.0}, 9), std::invalid_argument);
}

TEST_CASE("finite-s drift of the slow system is exact above zero") {
    const QedParams q{0.7, 0.4, 1.3};
    for (long long s : {25LL, 400LL, 1000000LL}) {
        const DriftPoint d = finite_s_drift(BoundSystem::slow, q, s, 1.7);
        CHECK(d.mean == doctest::Approx(-q.beta * q.mu_slow).epsilon(1e-12));
    }
}

TEST_CASE("finite-s drift converges to the diffusion limit") {
    const QedParams q{0.5, 0.5, 1.0};

    SUBCASE("fast system at the origin") {
        const DriftPoint big = finite_s_drift(BoundSystem::fast, q, 1000000, 0.0);
        const DriftPoint lim = diffusion_limit_drift(BoundSystem::fast, q, 0.0);
        CHECK(std::abs(big.mean - lim.mean) <= 0.01);
        CHECK(std::abs(big.variance - lim.variance) <= 0.01);
    }

    SUBCASE("fast system below zero approaches mu_slow(-beta-gamma-x)") {
        const double x = -1.0;
        const DriftPoint d = finite_s_drift(BoundSystem::fast, q, 10000, x);
        const DriftPoint lim = diffusion_limit_drift(BoundSystem::fast, q, x);
        CHECK(std::abs(d.mean - lim.mean) <= 0.03);  // O(1/sqrt(s))
    }

    SUBCASE("uniform error on [-3,3] shrinks like 1/sqrt(s)") {
        for (BoundSystem sys : {BoundSystem::fast, BoundSystem::slow}) {
            double prev_mean = 0.0, prev_var = 0.0;
            bool first = true;
            for (long long s : {100LL, 10000LL, 1000000LL}) {
                double worst_mean = 0.0, worst_var = 0.0;
                const int npts = 613;
                for (int k = 0; k <= npts; ++k) {
                    const double x = -3.0 + 6.0 * k / npts;
                    const DriftPoint d = finite_s_drift(sys, q, s, x);
                    const DriftPoint lim = diffusion_limit_drift(sys, q, x);
                    worst_mean = std::max(worst_mean, std::abs(d.mean - lim.mean));
                    worst_var = std::max(worst_var, std::abs(d.variance - lim.variance));
                }
                // C / sqrt(s) with stable C: check the fitted constant varies
                // by less than a factor two across decades
                const double c_mean = worst_mean * std::sqrt(static_cast<double>(s));
                const double c_var = worst_var * std::sqrt(static_cast<double>(s));
                if (!first) {
                    CHECK(c_mean <= 2.0 * prev_mean);
                    CHECK(c_mean >= 0.5 * prev_mean);
                    CHECK(c_var <= 2.0 * prev_var);
                    CHECK(c_var >= 0.5 * prev_var);
                }
                prev_mean = c_mean;
                prev_var = c_var;
                first = false;
            }
        }
    }
}

TEST_CASE("diffusion densities") {
    SplitMix64 rng(17);

    SUBCASE("normalized and continuous for random coefficients") {
        for (int rep = 0; rep < 100; ++rep) {
            const QedParams q{0.05 + 2.5 * rng.uniform01(), 0.05 + 2.5 * rng.uniform01(), 1.0};
            for (BoundSystem sys : {BoundSystem::fast, BoundSystem::slow}) {
                const double b = sys == BoundSystem::fast ? q.beta + q.gamma : q.beta;
                auto f = [&](double x) { return diffusion_density(sys, q, x); };
                const double below = testsupport::adaptive_simpson(f, -40.0, 0.0, 1e-12);
                const double above = testsupport::adaptive_simpson(f, 0.0, 60.0 / b, 1e-12) +
                                     (1.0 - b / (b + normal_pdf(b) / normal_cdf(b))) *
                                         std::exp(-60.0);
                CHECK(below + above == doctest::Approx(1.0).epsilon(1e-10));
                const double left = diffusion_density(sys, q, 0.0);
                const double right = diffusion_density(sys, q, 1e-14);
                CHECK(std::abs(left - right) <= 1e-10);
            }
        }
    }

    SUBCASE("mass above zero is the Halfin-Whitt value") {
        const QedParams q{0.5, 0.5, 1.0};
        auto f = [&](double x) { return diffusion_density(BoundSystem::slow, q, x); };
        const double above = testsupport::adaptive_simpson(f, 0.0, 120.0, 1e-13);
        CHECK(above == doctest::Approx(halfin_whitt(q.beta)).epsilon(1e-9));
    }
}

TEST_CASE("delay bounds") {
    const QedParams q{0.5, 0.5, 1.0};
    const DelayBounds db = delay_bounds(q);
    CHECK(db.upper == doctest::Approx(0.5045).epsilon(2e-3));
    CHECK(db.lower == doctest::Approx(0.2234).epsilon(2e-3));
    CHECK(db.lower < db.upper);

    SUBCASE("independent high-precision recomputation") {
        // Phi/phi by quadrature of the normal density
        for (double b : {0.5, 1.0}) {
            const double phi_quad = normal_pdf(b);
            const double Phi_quad =
                0.5 + testsupport::adaptive_simpson([](double x) { return normal_pdf(x); },
                                                    0.0, b, 1e-14);
            const double hw = 1.0 / (1.0 + b * Phi_quad / phi_quad);
            CHECK(halfin_whitt(b) == doctest::Approx(hw).epsilon(1e-12));
        }
    }

    SUBCASE("degenerate gap collapses the interval") {
        const DelayBounds tight = delay_bounds({0.5, 1e-9, 1.0});
        CHECK(std::abs(tight.upper - tight.lower) <= 1e-8);
    }

    SUBCASE("overwhelming capacity kills the delay") {
        const DelayBounds tiny = delay_bounds({8.0, 0.5, 1.0});
        CHECK(tiny.upper <= 1e-10);
        CHECK(tiny.lower <= 1e-10);
    }
}

TEST_CASE("convergence table sandwich and load identity") {
    const QedParams q{0.5, 0.5, 1.0};
    const std::vector<int> sizes{25, 50, 100};
    const auto rows = qed_convergence_table(q, sizes);
    REQUIRE(rows.size() == sizes.size());
    for (const auto& r : rows) {
        CHECK(r.p_wait_fast <= r.p_wait_slowdown + 1e-12);
        CHECK(r.p_wait_slowdown <= r.p_wait_slow + 1e-12);
        CHECK(r.p_wait_slowdown > 0.0);
        CHECK(r.p_wait_slowdown < 1.0);
    }

    // effective-load identity: rho(s) = (1 - beta/sqrt(s)) (1 + P(W>0) gamma/sqrt(s)) / (1 + gamma/sqrt(s))
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        const int s = sizes[k];
        const double sq = std::sqrt(static_cast<double>(s));
        const ModelParams p = scaled_params(q, s);
        const double pw = rows[k].p_wait_slowdown;
        const double rho = (1.0 - pw) * p.rho_fast + pw * p.rho_slow;
        const double identity = (1.0 - q.beta / sq) * (1.0 + pw * q.gamma / sq) /
                                (1.0 + q.gamma / sq);
        CHECK(rho == doctest::Approx(identity).epsilon(1e-10));
    }
}
