#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "slowq/errors.hpp"
#include "slowq/gth.hpp"
#include "slowq/oracle.hpp"
#include "slowq/solver.hpp"
#include "support/checks.hpp"

using namespace slowq;

TEST_CASE("dense GTH on a tiny generator") {
    // two-state chain: 0 -> 1 at rate 2, 1 -> 0 at rate 1; pi = (1/3, 2/3)
    Matrix Q(2, 2);
    Q << -2.0, 2.0, 1.0, -1.0;
    Vector pi = gth_stationary(Q);
    pi /= pi.sum();
    CHECK(pi(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(pi(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("banded GTH equals dense GTH on a random band matrix") {
    // random conservative generator with bandwidth 3
    const int n = 30;
    Matrix Q = Matrix::Zero(n, n);
    std::uint64_t state = 12345;
    auto rnd = [&] {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(state >> 11) * 0x1.0p-53;
    };
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - 3); j <= std::min(n - 1, i + 3); ++j)
            if (i != j) Q(i, j) = 0.05 + rnd();
    for (int i = 0; i < n; ++i) Q(i, i) = -Q.row(i).sum();

    BandedGenerator band(n, 3);
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - 3); j <= std::min(n - 1, i + 3); ++j)
            if (i != j) band.at(i, j) = Q(i, j);

    Vector dense = gth_stationary(Q);
    dense /= dense.sum();
    auto banded = band.stationary();
    double total = 0.0;
    for (double v : banded) total += v;
    for (int i = 0; i < n; ++i)
        CHECK(banded[static_cast<std::size_t>(i)] / total ==
              doctest::Approx(dense(i)).epsilon(1e-12));
}

TEST_CASE("oracle matches the matrix-analytic solver on a single server") {
    const ModelParams p = build_params(1, 0.5, 1.5, 1.0);
    const StationaryDistribution exact = solve_stationary(p);
    const StationaryDistribution ref = truncated_generator_solve(p, 1e-13);
    CHECK(testsupport::max_state_disagreement(exact, ref, ref.top_level() - 5) <= 1e-10);
}

TEST_CASE("truncation tolerance is immaterial once converged") {
    const ModelParams p = params_from_loads(4, 4.0, 0.6, 0.85);
    const double a = truncated_generator_solve(p, 1e-13).p_wait();
    const double b = truncated_generator_solve(p, 1e-10).p_wait();
    CHECK(std::abs(a - b) <= 1e-10);
}

TEST_CASE("oracle respects the state cap") {
    // rho_slow pushed so close to 1 that the doubling blows past the cap
    const ModelParams p = params_from_loads(64, 64.0, 0.5, 0.999999);
    CHECK_THROWS_AS(truncated_generator_solve(p, 1e-13), NumericalError);
}

TEST_CASE("oracle handles the finite buffer exactly") {
    const ModelParams base = params_from_loads(4, 4.0, 0.8, 1.3);
    const StationaryDistribution d = truncated_generator_solve(FiniteBufferParams{base, 9});
    double mass = 0.0;
    for (int i = 0; i <= 9; ++i) mass += d.level_mass(i);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(testsupport::max_balance_residual(d) <= 1e-10);
}
