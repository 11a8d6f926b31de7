#include "slowq/oracle.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "slowq/errors.hpp"
#include "slowq/gth.hpp"

namespace slowq {

namespace {

constexpr std::int64_t kStateCap = 2'000'000;

struct TruncatedChain {
    int s = 0;
    int top = 0;  // highest level
    std::int64_t states = 0;

    std::int64_t index(int i, int j) const {
        if (i < s) return static_cast<std::int64_t>(i) * (i + 1) / 2 + j;
        return static_cast<std::int64_t>(s) * (s + 1) / 2 +
               static_cast<std::int64_t>(i - s) * (s + 1) + j;
    }
};

// Full generator on levels 0..top; arrivals at the top level are dropped.
// delta > 0 adds the per-waiting-customer abandonment rate.
StationaryDistribution solve_truncated(const ModelParams& p, int top, double delta) {
    TruncatedChain c;
    c.s = p.s;
    c.top = top;
    c.states = c.index(top, p.s) + 1;
    if (c.states > kStateCap)
        throw NumericalError("truncated_generator_solve",
                             std::to_string(c.states) +
                                 " states exceed the cap; use the matrix-analytic path");

    BandedGenerator gen(c.states, p.s + 2);
    auto add = [&](int i, int j, int i2, int j2, double rate) {
        if (rate > 0.0) gen.at(c.index(i, j), c.index(i2, j2)) += rate;
    };
    for (int i = 0; i <= top; ++i) {
        const int jmax = std::min(i, p.s);
        for (int j = 0; j <= jmax; ++j) {
            if (i < p.s) {
                add(i, j, i + 1, j + 1, p.lambda);
                if (i > 0) {
                    add(i, j, i - 1, j, (i - j) * p.mu_slow);
                    if (j > 0) add(i, j, i - 1, j - 1, j * p.mu_fast);
                }
            } else {
                if (i < top) add(i, j, i + 1, j, p.lambda);
                add(i, j, i - 1, j, (p.s - j) * p.mu_slow + (i - p.s) * delta);
                if (j > 0) add(i, j, i - 1, j - 1, j * p.mu_fast);
            }
        }
    }

    const std::vector<double> pi = gen.stationary();
    double total = 0.0;
    for (double v : pi) total += v;

    StationaryDistribution dist;
    dist.params = p;
    dist.normalizer = total;
    dist.boundary.resize(static_cast<std::size_t>(p.s));
    for (int i = 0; i < p.s; ++i) {
        auto& level = dist.boundary[static_cast<std::size_t>(i)];
        level.resize(static_cast<std::size_t>(i) + 1);
        for (int j = 0; j <= i; ++j)
            level[static_cast<std::size_t>(j)] = pi[static_cast<std::size_t>(c.index(i, j))] / total;
    }
    dist.p_s = Vector::Zero(p.s + 1);
    for (int j = 0; j <= p.s; ++j)
        dist.p_s(j) = pi[static_cast<std::size_t>(c.index(p.s, j))] / total;
    ExplicitTail tail;
    tail.levels.reserve(static_cast<std::size_t>(top - p.s));
    for (int i = p.s + 1; i <= top; ++i) {
        Vector v = Vector::Zero(p.s + 1);
        for (int j = 0; j <= p.s; ++j)
            v(j) = pi[static_cast<std::size_t>(c.index(i, j))] / total;
        tail.levels.push_back(std::move(v));
    }
    dist.tail = std::move(tail);
    return dist;
}

StationaryDistribution solve_with_doubling(const ModelParams& p, int tail0, double delta,
                                           double tail_tol) {
    int tail_len = tail0;
    StationaryDistribution cur = solve_truncated(p, p.s + tail_len, delta);
    double pw = cur.p_wait();
    while (true) {
        tail_len *= 2;
        StationaryDistribution next = solve_truncated(p, p.s + tail_len, delta);
        const double pw_next = next.p_wait();
        const bool settled = std::abs(pw_next - pw) <= tail_tol;
        cur = std::move(next);
        pw = pw_next;
        if (settled) return cur;
    }
}

}  // namespace

StationaryDistribution truncated_generator_solve(const ModelParams& params,
                                                 double tail_tol) {
    if (!check_ergodicity(params))
        throw NumericalError("truncated_generator_solve",
                             "rho_slow >= 1; only the variants admit unstable loads");
    const int guess = static_cast<int>(
        std::ceil(std::log(tail_tol) / std::log(params.rho_slow)));
    return solve_with_doubling(params, std::max(64, guess), 0.0, tail_tol);
}

StationaryDistribution truncated_generator_solve(const FiniteBufferParams& fb) {
    if (fb.buffer < fb.base.s)
        throw std::invalid_argument("truncated_generator_solve: buffer N must be >= s");
    return solve_truncated(fb.base, fb.buffer, 0.0);
}

StationaryDistribution truncated_generator_solve(const AbandonmentParams& ab,
                                                 double tail_tol) {
    if (!(ab.delta > 0.0))
        throw std::invalid_argument("truncated_generator_solve: delta must be positive");
    const int guess =
        static_cast<int>(std::ceil(10.0 * ab.base.lambda / ab.delta));
    return solve_with_doubling(ab.base, std::max(64, guess), ab.delta, tail_tol);
}

}  // namespace slowq
