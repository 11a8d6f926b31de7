#pragma once

#include <cstdint>
#include <vector>

#include "slowq/model.hpp"

namespace slowq {

/// Square-root scaling around the slow service rate:
///   lambda(s) = s mu_slow - beta mu_slow sqrt(s),
///   mu_fast(s) = mu_slow (1 + gamma / sqrt(s)).
struct QedParams {
    double beta = 0.0;
    double gamma = 0.0;
    double mu_slow = 1.0;
};

enum class BoundSystem { fast, slow };

/// Model parameters of the s-server scaled system; requires s > beta^2.
ModelParams scaled_params(const QedParams& qed, int s);

struct DriftPoint {
    double mean = 0.0;
    double variance = 0.0;
};

/// Infinitesimal mean/variance of the centered-and-scaled M/M/s process
/// (X - s)/sqrt(s) at position x, for finite s. Busy servers saturate at s,
/// so the drift is piecewise in x with a floor at the lattice points.
DriftPoint finite_s_drift(BoundSystem system, const QedParams& qed, std::int64_t s,
                          double x);

/// The s -> infinity limit: an Ornstein-Uhlenbeck drift below zero, constant
/// drift above, variance 2 mu_slow everywhere.
DriftPoint diffusion_limit_drift(BoundSystem system, const QedParams& qed, double x);

/// Stationary density of the limiting diffusion: truncated normal below
/// zero, exponential above, continuous at zero.
double diffusion_density(BoundSystem system, const QedParams& qed, double x);

double normal_pdf(double x);
double normal_cdf(double x);

/// Halfin-Whitt delay probability (1 + b Phi(b)/phi(b))^-1.
double halfin_whitt(double b);

struct DelayBounds {
    double lower = 0.0;  // fast system limit, HW(beta + gamma)
    double upper = 0.0;  // slow system limit, HW(beta)
};

/// Limiting delay-probability bounds for the slowdown system. The slow
/// system dominates from above and the fast system from below, so the upper
/// bound uses beta and the lower bound beta + gamma.
DelayBounds delay_bounds(const QedParams& qed);

struct QedTableRow {
    int s = 0;
    double p_wait_fast = 0.0;
    double p_wait_slowdown = 0.0;
    double p_wait_slow = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

/// Exact delay probabilities of the three systems under the scaling, per s,
/// together with the limiting bounds.
std::vector<QedTableRow> qed_convergence_table(const QedParams& qed,
                                               const std::vector<int>& s_list);

}  // namespace slowq
