#pragma once

#include <utility>
#include <vector>

#include "slowq/distribution.hpp"
#include "slowq/model.hpp"
#include "slowq/solver.hpp"

namespace slowq {

/// At most `buffer` customers in the system; arrivals finding a full system
/// are lost. Inherently stable, so rho_slow >= 1 is allowed.
struct FiniteBufferParams {
    ModelParams base;
    int buffer = 0;  // N >= s
};

/// Waiting customers abandon independently at rate delta each.
struct AbandonmentParams {
    ModelParams base;
    double delta = 0.0;
    double truncation_tail = 1e-10;  // certification tolerance for the tail cut
};

StationaryDistribution solve_finite_buffer(const FiniteBufferParams& fb);
StationaryDistribution solve_abandonment(const AbandonmentParams& ab);

/// Strict local maxima of P(L = i) with relative prominence >= 1e-6 over
/// both neighbours.
std::vector<std::pair<int, double>> find_modes(const MarginalDistribution& marginal);

}  // namespace slowq
