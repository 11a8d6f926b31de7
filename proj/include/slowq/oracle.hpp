#pragma once

#include "slowq/distribution.hpp"
#include "slowq/model.hpp"
#include "slowq/variants.hpp"

namespace slowq {

/// Direct stationary solve of the generator truncated at a finite level,
/// using band-limited GTH elimination over the full state space. Entirely
/// independent of the matrix-analytic pipeline; serves as the ground-truth
/// oracle. The truncation level doubles until the delay probability is
/// stable within tail_tol.
StationaryDistribution truncated_generator_solve(const ModelParams& params,
                                                 double tail_tol);

/// Finite buffer: the truncation at N is the model itself, so this solve is
/// exact (no doubling).
StationaryDistribution truncated_generator_solve(const FiniteBufferParams& fb);

StationaryDistribution truncated_generator_solve(const AbandonmentParams& ab,
                                                 double tail_tol);

}  // namespace slowq
