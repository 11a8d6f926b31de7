#pragma once

#include <utility>
#include <vector>

#include "slowq/distribution.hpp"
#include "slowq/model.hpp"

namespace slowq {

/// Full pipeline: generator blocks, explicit R/G/(I-R)^-1, first-passage
/// tables, level-s embedding, downward recursion, normalization.
/// Requires rho_slow < 1.
StationaryDistribution solve_stationary(const ModelParams& params);

struct PerformanceReport {
    double p_wait = 0.0;
    double mean_queue = 0.0;
    double mean_system = 0.0;
    double rho = 0.0;                  // (1 - p_wait) rho_fast + p_wait rho_slow
    double rho_minus_rho_fast = 0.0;
    double p_empty = 0.0;
};

PerformanceReport performance_report(const StationaryDistribution& dist,
                                     const ModelParams& params);

struct MarginalDistribution {
    std::vector<double> probabilities;  // P(L = i), i = 0..i_max
    double tail_mass = 0.0;             // P(L > i_max)
};

MarginalDistribution marginal_total(const StationaryDistribution& dist, int i_max);

/// Dense (i_max+1) x (s+1) array of p(i,j); zero where j > min(i, s).
Matrix joint_heatmap(const StationaryDistribution& dist, int i_max);

/// Smallest i with P(L > i) <= 1e-10, capped at s + 2000.
int default_i_max(const StationaryDistribution& dist);

struct DimensioningResult {
    int s_fast = 0;      // minimal servers for the plain M/M/s with rate mu_fast
    int s_slowdown = 0;  // minimal servers for the threshold slowdown system
};

/// Minimal s with delay probability <= target, for the fast reference system
/// (Erlang C) and for the slowdown system (exact solve; the search starts at
/// s_fast and respects the stability requirement s > lambda/mu_slow).
DimensioningResult dimension_servers(double mu_fast, double mu_slow, double lambda,
                                     double target_p_wait);

}  // namespace slowq
