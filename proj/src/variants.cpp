#include "slowq/variants.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "slowq/boundary.hpp"
#include "slowq/errors.hpp"
#include "slowq/rate_matrices.hpp"

namespace slowq {

namespace {

// R_i = -L1 (L0 + R_{i+1} Lm1)^-1 for a lower-triangular bracket with
// negative diagonal.
Matrix backward_rate_step(const Matrix& bracket, double lambda, const char* stage) {
    const int n = static_cast<int>(bracket.rows());
    for (int j = 0; j < n; ++j)
        if (!(bracket(j, j) < 0.0))
            throw NumericalError(stage, "rate recursion lost triangular negativity at phase " +
                                            std::to_string(j));
    return -lambda *
           bracket.triangularView<Eigen::Lower>().solve(Matrix::Identity(n, n));
}

// Shared back end once the level-(s+1) first-passage matrix G_{s+1} and the
// explicit tail rate matrices are known.
StationaryDistribution finish_with_tail(const ModelParams& base, const Matrix& g_s1,
                                        const std::vector<Matrix>& rate_seq) {
    const GeneratorBlocks blocks = generator_blocks(base);
    const ThetaTable theta = theta_table(base);
    const PsiTable psi = psi_table(base, theta);
    const Vector p_s = solve_level_s(blocks, g_s1, psi.full_psi_matrix());
    auto boundary = backward_boundary(base, theta, psi, p_s);

    std::vector<Vector> tail_levels;
    tail_levels.reserve(rate_seq.size());
    Vector v = p_s;
    for (const Matrix& Ri : rate_seq) {
        v = Ri.transpose() * v;
        tail_levels.push_back(v);
    }
    return normalize_finite(base, std::move(boundary), p_s, std::move(tail_levels));
}

}  // namespace

StationaryDistribution solve_finite_buffer(const FiniteBufferParams& fb) {
    const ModelParams& base = fb.base;
    const int s = base.s;
    const int N = fb.buffer;
    if (N < s)
        throw std::invalid_argument("solve_finite_buffer: buffer N must be >= s");

    const GeneratorBlocks blocks = generator_blocks(base);
    const int n = s + 1;

    if (N == s) {
        // No waiting room: a blocked arrival leaves the state unchanged, which
        // is the level-s embedding with G_{s+1} = I.
        return finish_with_tail(base, Matrix::Identity(n, n), {});
    }

    // R_N from the dead-end level, then backward to s+1.
    std::vector<Matrix> rate_seq(static_cast<std::size_t>(N - s));  // rate_seq[k] = R_{s+1+k}
    const Matrix lambda0_top = blocks.lambda0 + blocks.lambda1;
    Matrix Rnext = backward_rate_step(lambda0_top, base.lambda, "solve_finite_buffer");
    rate_seq[static_cast<std::size_t>(N - s - 1)] = Rnext;
    for (int i = N - 1; i > s; --i) {
        const Matrix bracket = blocks.lambda0 + Rnext * blocks.lambdam1;
        Rnext = backward_rate_step(bracket, base.lambda, "solve_finite_buffer");
        rate_seq[static_cast<std::size_t>(i - s - 1)] = Rnext;
    }
    const Matrix g_s1 = (Rnext * blocks.lambdam1) / base.lambda;
    return finish_with_tail(base, g_s1, rate_seq);
}

namespace {

struct AbandonmentSolve {
    StationaryDistribution dist;
    double p_wait = 0.0;
};

AbandonmentSolve solve_abandonment_truncated(const ModelParams& base, double delta,
                                             int tail_len) {
    const GeneratorBlocks blocks = generator_blocks(base);
    const int n = base.s + 1;
    const Matrix I = Matrix::Identity(n, n);

    // Level s+l blocks: L0 - l delta I within, Lm1 + l delta I downward.
    std::vector<Matrix> rate_seq(static_cast<std::size_t>(tail_len));
    Matrix Rnext = Matrix::Zero(n, n);  // R_{N*+1} = 0 truncation
    for (int l = tail_len; l >= 1; --l) {
        const Matrix bracket = blocks.lambda0 - l * delta * I +
                               Rnext * (blocks.lambdam1 + (l + 1) * delta * I);
        Rnext = backward_rate_step(bracket, base.lambda, "solve_abandonment");
        rate_seq[static_cast<std::size_t>(l - 1)] = Rnext;
    }
    const Matrix g_s1 = (Rnext * (blocks.lambdam1 + delta * I)) / base.lambda;

    AbandonmentSolve out;
    out.dist = finish_with_tail(base, g_s1, rate_seq);
    out.p_wait = out.dist.p_wait();
    return out;
}

}  // namespace

StationaryDistribution solve_abandonment(const AbandonmentParams& ab) {
    if (!(ab.delta > 0.0))
        throw std::invalid_argument("solve_abandonment: delta must be positive");
    const ModelParams& base = ab.base;
    const double tol = ab.truncation_tail;

    int tail_len = std::max(50, static_cast<int>(std::ceil(10.0 * base.lambda / ab.delta)));
    constexpr int kMaxTail = 1 << 21;

    AbandonmentSolve cur = solve_abandonment_truncated(base, ab.delta, tail_len);
    while (true) {
        if (2 * tail_len > kMaxTail)
            throw NumericalError("solve_abandonment",
                                 "truncation level did not certify below the cap (" +
                                     std::to_string(tail_len) + " tail levels)");
        AbandonmentSolve next = solve_abandonment_truncated(base, ab.delta, 2 * tail_len);
        const bool settled = std::abs(next.p_wait - cur.p_wait) <= tol;
        cur = std::move(next);
        tail_len *= 2;
        if (settled) break;
    }
    return std::move(cur.dist);
}

std::vector<std::pair<int, double>> find_modes(const MarginalDistribution& marginal) {
    const auto& p = marginal.probabilities;
    std::vector<std::pair<int, double>> modes;
    const int n = static_cast<int>(p.size());
    for (int i = 0; i < n; ++i) {
        if (!(p[static_cast<std::size_t>(i)] > 0.0)) continue;
        const double margin = 1e-6 * p[static_cast<std::size_t>(i)];
        const bool left_ok = i == 0 || p[static_cast<std::size_t>(i)] - p[static_cast<std::size_t>(i) - 1] >= margin;
        const bool right_ok =
            i == n - 1 || p[static_cast<std::size_t>(i)] - p[static_cast<std::size_t>(i) + 1] >= margin;
        if (left_ok && right_ok) modes.emplace_back(i, p[static_cast<std::size_t>(i)]);
    }
    return modes;
}

}  // namespace slowq
