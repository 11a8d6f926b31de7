#pragma once

#include <variant>
#include <vector>

#include "slowq/model.hpp"

namespace slowq {

/// Inner levels follow p_{s+k} = p_s R^k.
struct GeometricTail {
    Matrix R;
    Matrix inv_I_minus_R;
};

/// Inner levels stored explicitly (finite buffer, abandonment, truncated
/// oracle solves): levels[k] is the vector of level s+1+k.
struct ExplicitTail {
    std::vector<Vector> levels;
};

/// Normalized stationary distribution over states (i, j) with level i =
/// total customers and phase j = non-delayed customers in service.
struct StationaryDistribution {
    ModelParams params;
    std::vector<std::vector<double>> boundary;  // levels 0..s-1, level i holds phases 0..i
    Vector p_s;                                 // level s
    std::variant<GeometricTail, ExplicitTail> tail;
    double normalizer = 1.0;  // pre-normalization total mass, kept for diagnostics

    bool geometric() const { return std::holds_alternative<GeometricTail>(tail); }

    /// Highest level with stored (nonzero) mass; -1 means unbounded.
    int top_level() const;

    double p(int i, int j) const;
    Vector level_vector(int i) const;  // for i >= s
    double level_mass(int i) const;    // P(L = i)

    double p_wait() const;        // P(L >= s)
    double mean_queue() const;    // E[(L - s)^+]
    double expected_busy_servers() const;
    double mean_system() const;   // E[L]
    double p_empty() const { return boundary.empty() ? p_s(0) : boundary[0][0]; }

    double tail_mass_above(int i_max) const;  // P(L > i_max)
};

}  // namespace slowq
