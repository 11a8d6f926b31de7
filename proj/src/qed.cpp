#include "slowq/qed.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "slowq/erlang.hpp"
#include "slowq/solver.hpp"

namespace slowq {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779399;
constexpr double kInvSqrt2 = 0.7071067811865475244008;
}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double halfin_whitt(double b) {
    if (!(b > 0.0)) throw std::invalid_argument("halfin_whitt: b must be positive");
    return 1.0 / (1.0 + b * normal_cdf(b) / normal_pdf(b));
}

ModelParams scaled_params(const QedParams& qed, int s) {
    if (!(qed.beta > 0.0) || !(qed.gamma > 0.0) || !(qed.mu_slow > 0.0))
        throw std::invalid_argument("scaled_params: beta, gamma, mu_slow must be positive");
    if (!(s > qed.beta * qed.beta))
        throw std::invalid_argument("scaled_params: need s > beta^2, got s = " +
                                    std::to_string(s));
    const double sq = std::sqrt(static_cast<double>(s));
    const double lambda = s * qed.mu_slow - qed.beta * qed.mu_slow * sq;
    const double mu_fast = qed.mu_slow * (1.0 + qed.gamma / sq);
    return build_params(s, lambda, mu_fast, qed.mu_slow);
}

DriftPoint finite_s_drift(BoundSystem system, const QedParams& qed, std::int64_t s,
                          double x) {
    const double sd = static_cast<double>(s);
    const double sq = std::sqrt(sd);
    if (x < -sq) throw std::invalid_argument("finite_s_drift: x below -sqrt(s)");

    const double lambda = sd * qed.mu_slow - qed.beta * qed.mu_slow * sq;
    const double mu = (system == BoundSystem::fast)
                          ? qed.mu_slow * (1.0 + qed.gamma / sq)
                          : qed.mu_slow;
    // Busy servers at position x: floor(s + x sqrt(s)), capped at s.
    const double busy = std::min(std::floor(sd + x * sq), sd);

    DriftPoint d;
    d.mean = (lambda - busy * mu) / sq;
    d.variance = (lambda + busy * mu) / sd;
    return d;
}

DriftPoint diffusion_limit_drift(BoundSystem system, const QedParams& qed, double x) {
    const double gap = (system == BoundSystem::fast) ? qed.gamma : 0.0;
    DriftPoint d;
    d.mean = (x <= 0.0) ? qed.mu_slow * (-qed.beta - gap - x)
                        : qed.mu_slow * (-qed.beta - gap);
    d.variance = 2.0 * qed.mu_slow;
    return d;
}

double diffusion_density(BoundSystem system, const QedParams& qed, double x) {
    const double b = (system == BoundSystem::fast) ? qed.beta + qed.gamma : qed.beta;
    const double c = b / (b + normal_pdf(b) / normal_cdf(b));
    if (x <= 0.0) return c * normal_pdf(x + b) / normal_cdf(b);
    return (1.0 - c) * b * std::exp(-b * x);
}

DelayBounds delay_bounds(const QedParams& qed) {
    if (!(qed.beta > 0.0) || !(qed.gamma > 0.0))
        throw std::invalid_argument("delay_bounds: beta, gamma must be positive");
    DelayBounds db;
    db.upper = halfin_whitt(qed.beta);
    db.lower = halfin_whitt(qed.beta + qed.gamma);
    return db;
}

std::vector<QedTableRow> qed_convergence_table(const QedParams& qed,
                                               const std::vector<int>& s_list) {
    const DelayBounds db = delay_bounds(qed);
    std::vector<QedTableRow> rows;
    rows.reserve(s_list.size());
    for (int s : s_list) {
        const ModelParams p = scaled_params(qed, s);
        QedTableRow row;
        row.s = s;
        row.p_wait_fast = erlang_c(s, p.lambda / p.mu_fast);
        row.p_wait_slow = erlang_c(s, p.lambda / p.mu_slow);
        row.p_wait_slowdown = solve_stationary(p).p_wait();
        row.lower = db.lower;
        row.upper = db.upper;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace slowq
