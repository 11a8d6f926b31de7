#include "slowq/boundary.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>
#include <utility>

#include "slowq/errors.hpp"
#include "slowq/gth.hpp"

namespace slowq {

// ---------------------------------------------------------------------------
// theta table
// ---------------------------------------------------------------------------

ThetaTable::ThetaTable(int s) : s_(s) {
    offset_.resize(static_cast<std::size_t>(s) * (s + 1) / 2 + 1, 0);
    std::size_t total = 0;
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j <= i; ++j) {
            offset_[static_cast<std::size_t>(i) * (i + 1) / 2 + j] = total;
            total += static_cast<std::size_t>(i - j + 1);
        }
    }
    offset_.back() = total;
    values_.assign(total, 0.0);
}

const double* ThetaTable::slice(int i, int j) const {
    assert(i >= 0 && i < s_ && j >= 0 && j <= i);
    return values_.data() + offset_[static_cast<std::size_t>(i) * (i + 1) / 2 + j];
}

double* ThetaTable::slice(int i, int j) {
    assert(i >= 0 && i < s_ && j >= 0 && j <= i);
    return values_.data() + offset_[static_cast<std::size_t>(i) * (i + 1) / 2 + j];
}

ThetaTable theta_table(const ModelParams& params) {
    const int s = params.s;
    const double la = params.lambda;
    const double muS = params.mu_slow;
    const double muF = params.mu_fast;

    ThetaTable table(s);
    // One-step analysis per state. theta_k(i,j) references theta at (i-1,j),
    // (i-1,j-1) and (i-l,j), all available when i runs upward.
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j <= i; ++j) {
            double* th = table.slice(i, j);
            // Denominator: the j muF term is damped by the probability of an
            // immediate return to the same state through phase j-1.
            double denom = la + (i - j) * muS;
            if (j > 0) denom += j * muF * (1.0 - table(0, i - 1, j - 1));
            th[0] = la / denom;
            for (int k = 1; k <= i - j; ++k) {
                double num = (i - j) * muS * table(k - 1, i - 1, j);
                if (j > 0) {
                    const double* down = table.slice(i - 1, j - 1);  // theta_l(i-1,j-1)
                    double conv = 0.0;
                    for (int l = 1; l <= k; ++l) conv += down[l] * table(k - l, i - l, j);
                    num += j * muF * conv;
                }
                th[k] = num / denom;
            }
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// psi table
// ---------------------------------------------------------------------------

namespace {

// One target (k,l): sweeps the triangle T_(k,l) phase by phase, from l-1
// down to 0. Values at phase j only reference values at phase j+1, so two
// level-indexed columns suffice. psi is zero outside the triangle and
// delta_{j,l} at the target level k itself; both facts are baked into the
// summation limits. top_col (stride 1, indexed by source phase j) receives
// the level k-1 values consumed downstream; triangle, when given, keeps
// everything.
void sweep_psi_target(const ThetaTable& theta, int k, int l,
                      std::vector<double>& prev, std::vector<double>& cur,
                      double* top_col, PsiTriangle* triangle, std::uint64_t& evals) {
    const int d = k - l;  // slow completions needed before the target is hit
    std::fill(prev.begin(), prev.begin() + k + 1, 0.0);
    if (triangle) {
        triangle->k = k;
        triangle->l = l;
        triangle->rows.assign(static_cast<std::size_t>(l), {});
        for (int i = d; i <= k - 1; ++i)
            triangle->rows[static_cast<std::size_t>(i - d)].assign(
                static_cast<std::size_t>(i - d + 1), 0.0);
    }
    for (int j = l - 1; j >= 0; --j) {
        const int qmin = d + j + 1;
        for (int m = d + j; m <= k - 1; ++m) {
            const double* th = theta.slice(m, j);
            const int qmax = std::min(m + 1, k - 1);
            double acc = 0.0;
            for (int q = qmin; q <= qmax; ++q) acc += th[m + 1 - q] * prev[q];
            if (m == k - 1 && j == l - 1) acc += th[0];  // direct hit of (k,l)
            cur[m] = acc;
            ++evals;
            if (triangle) triangle->rows[static_cast<std::size_t>(m - d)][j] = acc;
        }
        if (top_col) top_col[j] = cur[k - 1];
        std::swap(prev, cur);
    }
}

}  // namespace

PsiTable psi_table(const ModelParams& params, const ThetaTable& theta) {
    const int s = params.s;
    std::vector<Matrix> level_up(static_cast<std::size_t>(s) + 1);
    std::uint64_t evals = 0;
    std::vector<double> prev(static_cast<std::size_t>(s) + 1),
        cur(static_cast<std::size_t>(s) + 1);
    for (int k = 1; k <= s; ++k) {
        Matrix& phi = level_up[static_cast<std::size_t>(k)];
        phi = Matrix::Zero(k, k + 1);
        for (int l = 1; l <= k; ++l)
            sweep_psi_target(theta, k, l, prev, cur, phi.col(l).data(), nullptr, evals);
    }
    return PsiTable(s, std::move(level_up), evals);
}

PsiTriangle psi_target_triangle(const ModelParams& params, const ThetaTable& theta,
                                int k, int l) {
    assert(k >= 1 && k <= params.s && l >= 0 && l <= k);
    (void)params;
    PsiTriangle tri;
    tri.k = k;
    tri.l = l;
    if (l == 0) return tri;  // empty triangle
    std::vector<double> prev(static_cast<std::size_t>(k) + 1),
        cur(static_cast<std::size_t>(k) + 1);
    std::uint64_t evals = 0;
    sweep_psi_target(theta, k, l, prev, cur, nullptr, &tri, evals);
    return tri;
}

Matrix PsiTable::full_psi_matrix() const {
    Matrix Psi = Matrix::Zero(s_ + 1, s_ + 1);
    Psi.topLeftCorner(s_, s_ + 1) = level_up_[static_cast<std::size_t>(s_)];
    return Psi;
}

// ---------------------------------------------------------------------------
// level-s embedding and the downward recursion
// ---------------------------------------------------------------------------

Vector solve_level_s(const GeneratorBlocks& blocks, const Matrix& G, const Matrix& Psi) {
    const int n = static_cast<int>(blocks.lambda0.rows());
    const Matrix M = blocks.lambdam1 * Psi + blocks.lambda0 + blocks.lambda1 * G;

    const double scale = std::max(1.0, blocks.lambda0.cwiseAbs().maxCoeff());
    for (int i = 0; i < n; ++i) {
        const double rs = M.row(i).sum();
        if (std::abs(rs) > 1e-8 * scale)
            throw NumericalError("solve_level_s",
                                 "embedded generator is not conservative: row " +
                                     std::to_string(i) + " sums to " + std::to_string(rs));
    }

    // GTH keeps the state it eliminates last. Use reversed phase order so the
    // survivor is phase s: that phase stays recurrent in every variant of the
    // embedded chain (in the loss case N = s all mass collapses onto it).
    Matrix Mr(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) Mr(a, b) = M(n - 1 - a, n - 1 - b);
    const Vector pir = gth_stationary(std::move(Mr));
    Vector p_s(n);
    for (int j = 0; j < n; ++j) p_s(j) = pir(n - 1 - j);
    return p_s;
}

std::vector<std::vector<double>> backward_boundary(const ModelParams& params,
                                                   const ThetaTable& theta,
                                                   const PsiTable& psi,
                                                   const Vector& p_s) {
    const int s = params.s;
    const double la = params.lambda;
    const double muS = params.mu_slow;
    const double muF = params.mu_fast;

    std::vector<std::vector<double>> boundary(static_cast<std::size_t>(s));
    std::vector<double> upper(p_s.data(), p_s.data() + s + 1);

    for (int i = s - 1; i >= 1; --i) {
        std::vector<double> level(static_cast<std::size_t>(i) + 1, 0.0);
        const Matrix& up = psi.level_up(i);  // up(k, j) = psi_{(i,j)}(i-1, k)
        for (int j = 0; j <= i; ++j) {
            double denom = la + (i - j) * muS;
            if (j > 0) denom += j * muF * (1.0 - theta(0, i - 1, j - 1));
            double rhs = upper[static_cast<std::size_t>(j)] * (i + 1 - j) * muS +
                         upper[static_cast<std::size_t>(j) + 1] * (j + 1) * muF;
            // Same-level inflow: states (i,k) with k < j leave downward and
            // re-enter level i at phase j with probability psi_{(i,j)}(i-1,.).
            for (int k = 0; k <= j - 1; ++k)
                rhs += level[static_cast<std::size_t>(k)] * (i - k) * muS * up(k, j);
            for (int k = 1; k <= j - 1; ++k)
                rhs += level[static_cast<std::size_t>(k)] * k * muF * up(k - 1, j);
            level[static_cast<std::size_t>(j)] = rhs / denom;
        }
        for (double& v : level) {
            if (v < 0.0) {
                if (v < -1e-12)
                    throw NumericalError(
                        "backward_boundary",
                        "negative probability " + std::to_string(v) + " at level " +
                            std::to_string(i) + "; recursion lost accuracy");
                v = 0.0;
            }
        }
        boundary[static_cast<std::size_t>(i)] = std::move(level);
        upper = boundary[static_cast<std::size_t>(i)];
    }

    const double p10 = (s == 1) ? p_s(0) : boundary[1][0];
    const double p11 = (s == 1) ? p_s(1) : boundary[1][1];
    boundary[0] = {(p10 * muS + p11 * muF) / la};
    return boundary;
}

// ---------------------------------------------------------------------------
// normalization
// ---------------------------------------------------------------------------

namespace {

double boundary_sum(const std::vector<std::vector<double>>& boundary) {
    double acc = 0.0;
    for (const auto& level : boundary)
        for (double v : level) acc += v;
    return acc;
}

}  // namespace

StationaryDistribution normalize(const ModelParams& params,
                                 std::vector<std::vector<double>> boundary, Vector p_s,
                                 const Matrix& R, const Matrix& inv_I_minus_R) {
    const double total =
        boundary_sum(boundary) + p_s.dot(inv_I_minus_R * Vector::Ones(params.s + 1));
    if (!(total > 0.0) || !std::isfinite(total))
        throw NumericalError("normalize", "total mass " + std::to_string(total) +
                                              " is not positive and finite");
    for (auto& level : boundary)
        for (double& v : level) v /= total;
    p_s /= total;

    StationaryDistribution dist;
    dist.params = params;
    dist.boundary = std::move(boundary);
    dist.p_s = std::move(p_s);
    dist.tail = GeometricTail{R, inv_I_minus_R};
    dist.normalizer = total;
    return dist;
}

StationaryDistribution normalize_finite(const ModelParams& params,
                                        std::vector<std::vector<double>> boundary,
                                        Vector p_s, std::vector<Vector> tail_levels) {
    double total = boundary_sum(boundary) + p_s.sum();
    for (const auto& v : tail_levels) total += v.sum();
    if (!(total > 0.0) || !std::isfinite(total))
        throw NumericalError("normalize", "total mass " + std::to_string(total) +
                                              " is not positive and finite");
    for (auto& level : boundary)
        for (double& v : level) v /= total;
    p_s /= total;
    for (auto& v : tail_levels) v /= total;

    StationaryDistribution dist;
    dist.params = params;
    dist.boundary = std::move(boundary);
    dist.p_s = std::move(p_s);
    dist.tail = ExplicitTail{std::move(tail_levels)};
    dist.normalizer = total;
    return dist;
}

}  // namespace slowq
