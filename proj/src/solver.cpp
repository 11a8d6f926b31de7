#include "slowq/solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "slowq/boundary.hpp"
#include "slowq/erlang.hpp"
#include "slowq/errors.hpp"
#include "slowq/rate_matrices.hpp"

namespace slowq {

StationaryDistribution solve_stationary(const ModelParams& params) {
    if (!check_ergodicity(params))
        throw NumericalError("solve_stationary",
                             "rho_slow = " + std::to_string(params.rho_slow) +
                                 " >= 1; use the finite-buffer or abandonment variant");
    const GeneratorBlocks blocks = generator_blocks(params);
    const RateMatrices rm = rate_matrices(blocks, params);
    const ThetaTable theta = theta_table(params);
    const PsiTable psi = psi_table(params, theta);
    const Vector p_s = solve_level_s(blocks, rm.G, psi.full_psi_matrix());
    auto boundary = backward_boundary(params, theta, psi, p_s);
    return normalize(params, std::move(boundary), p_s, rm.R, rm.inv_I_minus_R);
}

PerformanceReport performance_report(const StationaryDistribution& dist,
                                     const ModelParams& params) {
    PerformanceReport r;
    r.p_wait = dist.p_wait();
    r.mean_queue = dist.mean_queue();
    r.mean_system = r.mean_queue + dist.expected_busy_servers();
    r.rho = (1.0 - r.p_wait) * params.rho_fast + r.p_wait * params.rho_slow;
    r.rho_minus_rho_fast = r.rho - params.rho_fast;
    r.p_empty = dist.p_empty();
    return r;
}

MarginalDistribution marginal_total(const StationaryDistribution& dist, int i_max) {
    const int s = dist.params.s;
    if (i_max < s) throw std::invalid_argument("marginal_total: i_max must be >= s");

    MarginalDistribution m;
    m.probabilities.resize(static_cast<std::size_t>(i_max) + 1, 0.0);
    for (int i = 0; i < s; ++i) m.probabilities[static_cast<std::size_t>(i)] = dist.level_mass(i);

    if (dist.geometric()) {
        const auto& gt = std::get<GeometricTail>(dist.tail);
        Vector v = dist.p_s;
        for (int i = s; i <= i_max; ++i) {
            m.probabilities[static_cast<std::size_t>(i)] = v.sum();
            v = gt.R.transpose() * v;
        }
        m.tail_mass = v.dot(gt.inv_I_minus_R * Vector::Ones(s + 1));
    } else {
        const auto& lv = std::get<ExplicitTail>(dist.tail).levels;
        m.probabilities[static_cast<std::size_t>(s)] = dist.p_s.sum();
        for (std::size_t k = 0; k < lv.size(); ++k) {
            const int i = s + 1 + static_cast<int>(k);
            if (i <= i_max)
                m.probabilities[static_cast<std::size_t>(i)] = lv[k].sum();
            else
                m.tail_mass += lv[k].sum();
        }
    }
    return m;
}

Matrix joint_heatmap(const StationaryDistribution& dist, int i_max) {
    const int s = dist.params.s;
    if (i_max < s) throw std::invalid_argument("joint_heatmap: i_max must be >= s");
    Matrix h = Matrix::Zero(i_max + 1, s + 1);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j <= i; ++j) h(i, j) = dist.boundary[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    if (dist.geometric()) {
        const auto& gt = std::get<GeometricTail>(dist.tail);
        Vector v = dist.p_s;
        for (int i = s; i <= i_max; ++i) {
            h.row(i) = v.transpose();
            v = gt.R.transpose() * v;
        }
    } else {
        for (int i = s; i <= i_max && i <= dist.top_level(); ++i)
            h.row(i) = dist.level_vector(i).transpose();
    }
    return h;
}

int default_i_max(const StationaryDistribution& dist) {
    const int s = dist.params.s;
    const int cap = s + 2000;
    if (!dist.geometric()) return std::min(cap, dist.top_level());

    const auto& gt = std::get<GeometricTail>(dist.tail);
    const Vector t = gt.inv_I_minus_R * Vector::Ones(s + 1);
    Vector v = gt.R.transpose() * dist.p_s;  // level s+1
    for (int i = s; i < cap; ++i) {
        if (v.dot(t) <= 1e-10) return i;  // P(L > i) = p_{i+1} (I-R)^-1 1
        v = gt.R.transpose() * v;
    }
    return cap;
}

DimensioningResult dimension_servers(double mu_fast, double mu_slow, double lambda,
                                     double target_p_wait) {
    if (!(target_p_wait > 0.0 && target_p_wait < 1.0))
        throw std::invalid_argument("dimension_servers: target must be in (0,1)");
    if (!(mu_fast > mu_slow) || !(mu_slow > 0.0) || !(lambda > 0.0))
        throw std::invalid_argument("dimension_servers: invalid rates");

    DimensioningResult res;
    const double a_fast = lambda / mu_fast;
    int s = static_cast<int>(std::floor(a_fast)) + 1;
    while (erlang_c(s, a_fast) > target_p_wait) ++s;
    res.s_fast = s;

    const int cap = static_cast<int>(std::ceil(10.0 * lambda / mu_slow));
    int t = std::max(res.s_fast, static_cast<int>(std::floor(lambda / mu_slow)) + 1);
    for (; t <= cap; ++t) {
        const ModelParams p = build_params(t, lambda, mu_fast, mu_slow);
        const StationaryDistribution dist = solve_stationary(p);
        if (dist.p_wait() <= target_p_wait) {
            res.s_slowdown = t;
            return res;
        }
    }
    throw NumericalError("dimension_servers",
                         "no server count up to the safety cap met the target");
}

}  // namespace slowq
