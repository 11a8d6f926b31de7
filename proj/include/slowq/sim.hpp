#pragma once

#include <cstdint>
#include <vector>

#include "slowq/model.hpp"

namespace slowq {

struct SimConfig {
    ModelParams params;
    double horizon = 1e5;            // simulated time units
    double warmup = -1.0;            // negative: default to 10% of horizon
    std::uint64_t seed = 1;
    int replications = 1;
    long long initial_customers = 0;
    long long customers = 0;         // coupled runs: 0 means round(lambda * horizon)
};

struct BusyPeriodStats {
    long long count = 0;       // excursions of X at or above s
    double mean_length = 0.0;
    double max_length = 0.0;
};

struct SimEstimates {
    double p_wait_hat = 0.0;
    double p_wait_halfwidth = 0.0;  // 95% CI
    double mean_l_hat = 0.0;
    double mean_l_halfwidth = 0.0;
    BusyPeriodStats busy;
};

/// Event-driven simulation of (X, Y): arrivals raise X (and Y when a server
/// is free), fast completions lower both, slow completions lower X only.
/// Time-average estimators with batch-means confidence intervals (32
/// batches); deterministic for a fixed seed.
SimEstimates simulate(const SimConfig& config);

struct SamplePoint {
    double t = 0.0;
    long long x = 0;
    int y = 0;
};

/// Single-replication trajectory, one point per event.
std::vector<SamplePoint> simulate_path(const SimConfig& config);

struct CouplingReport {
    long long customers_checked = 0;
    long long violations_ws_ge_w = 0;   // W_slow(i) >= W(i) breached
    long long violations_w_ge_wf = 0;   // W(i) >= W_fast(i) breached
    long long violations_xs_ge_x = 0;   // X_slow(t) >= X(t) breached
    long long violations_x_ge_xf = 0;   // X(t) >= X_fast(t) breached
    double max_violation_magnitude = 0.0;
};

/// Runs the slow, slowdown and fast systems on one shared arrival stream and
/// shared unit-exponential service requirements (scaled by the applicable
/// rate), then checks the pathwise dominance of waiting times and, through
/// sorted departure epochs, of the state processes.
CouplingReport simulate_coupled(const SimConfig& config);

}  // namespace slowq
