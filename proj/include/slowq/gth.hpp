#pragma once

#include <cstdint>
#include <vector>

#include "slowq/model.hpp"

namespace slowq {

/// Stationary vector of a conservative generator by Grassmann/GTH state
/// reduction (subtraction-free, so no cancellation). States are eliminated
/// from the highest index down; the surviving state 0 gets value 1 and the
/// rest follow by back-substitution. The result is unnormalized.
Vector gth_stationary(Matrix Q);

/// Band-limited GTH for large block-tridiagonal generators. Off-diagonal
/// entries must satisfy |i - j| <= half_band; elimination fill-in stays
/// inside the band.
class BandedGenerator {
public:
    BandedGenerator(std::int64_t n, int half_band);

    std::int64_t size() const { return n_; }
    int half_band() const { return hb_; }

    double& at(std::int64_t i, std::int64_t j);
    double get(std::int64_t i, std::int64_t j) const;

    /// Unnormalized stationary vector (state 0 pinned to 1). Destroys the
    /// stored matrix.
    std::vector<double> stationary();

private:
    std::int64_t n_;
    int hb_;
    int width_;
    std::vector<double> a_;  // row-major, a_[i*width_ + (j - i + hb_)]
};

}  // namespace slowq
