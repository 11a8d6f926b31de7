#pragma once

#include "slowq/model.hpp"

namespace slowq {

/// R, G and (I-R)^-1 for the level-independent part of the chain. All three
/// are lower triangular; R solves L1 + R L0 + R^2 Lm1 = 0 and G solves
/// Lm1 + L0 G + L1 G^2 = 0.
struct RateMatrices {
    Matrix R;
    Matrix G;
    Matrix inv_I_minus_R;
};

/// Closed-form R: diagonal entries are minimal quadratic roots, subdiagonals
/// follow from a linear sweep over h = i - j = 1..s. Requires rho_slow < 1.
Matrix compute_R(const GeneratorBlocks& blocks, const ModelParams& params);

/// G = L1^-1 R Lm1 = (1/lambda) R Lm1.
Matrix compute_G(const GeneratorBlocks& blocks, const Matrix& R);

/// Forward-substitution inverse of I - R; valid while all R(j,j) < 1.
Matrix invert_I_minus_R(const Matrix& R);

RateMatrices rate_matrices(const GeneratorBlocks& blocks, const ModelParams& params);

}  // namespace slowq
