#include "slowq/gth.hpp"

#include <algorithm>
#include <cassert>
#include <string>

#include "slowq/errors.hpp"

namespace slowq {

Vector gth_stationary(Matrix Q) {
    const int n = static_cast<int>(Q.rows());
    assert(Q.cols() == n);

    for (int k = n - 1; k >= 1; --k) {
        double out = 0.0;
        for (int j = 0; j < k; ++j) out += Q(k, j);
        if (!(out > 0.0))
            throw NumericalError("gth_stationary",
                                 "no outflow from state " + std::to_string(k) +
                                     " to the remaining states (reducible chain?)");
        for (int i = 0; i < k; ++i) Q(i, k) /= out;
        for (int i = 0; i < k; ++i) {
            const double w = Q(i, k);
            if (w == 0.0) continue;
            for (int j = 0; j < k; ++j) {
                if (j == i) continue;
                Q(i, j) += w * Q(k, j);
            }
        }
    }

    Vector pi = Vector::Zero(n);
    pi(0) = 1.0;
    for (int k = 1; k < n; ++k) {
        double acc = 0.0;
        for (int i = 0; i < k; ++i) acc += pi(i) * Q(i, k);
        pi(k) = acc;
    }
    return pi;
}

BandedGenerator::BandedGenerator(std::int64_t n, int half_band)
    : n_(n), hb_(half_band), width_(2 * half_band + 1), a_(n * width_, 0.0) {}

double& BandedGenerator::at(std::int64_t i, std::int64_t j) {
    assert(i >= 0 && i < n_ && j >= 0 && j < n_);
    assert(j - i >= -hb_ && j - i <= hb_);
    return a_[i * width_ + (j - i + hb_)];
}

double BandedGenerator::get(std::int64_t i, std::int64_t j) const {
    if (j - i < -hb_ || j - i > hb_) return 0.0;
    return a_[i * width_ + (j - i + hb_)];
}

std::vector<double> BandedGenerator::stationary() {
    // Same elimination as the dense version, restricted to the band. When
    // state k is eliminated, all its in/out neighbours live in
    // [k - hb_, k - 1], so fill-in never leaves the band.
    for (std::int64_t k = n_ - 1; k >= 1; --k) {
        const std::int64_t lo = std::max<std::int64_t>(0, k - hb_);
        double out = 0.0;
        for (std::int64_t j = lo; j < k; ++j) out += at(k, j);
        if (!(out > 0.0))
            throw NumericalError("banded_gth",
                                 "no outflow from state " + std::to_string(k));
        for (std::int64_t i = lo; i < k; ++i) at(i, k) /= out;
        for (std::int64_t i = lo; i < k; ++i) {
            const double w = at(i, k);
            if (w == 0.0) continue;
            for (std::int64_t j = lo; j < k; ++j) {
                if (j == i) continue;
                at(i, j) += w * at(k, j);
            }
        }
    }

    std::vector<double> pi(n_, 0.0);
    pi[0] = 1.0;
    for (std::int64_t k = 1; k < n_; ++k) {
        const std::int64_t lo = std::max<std::int64_t>(0, k - hb_);
        double acc = 0.0;
        for (std::int64_t i = lo; i < k; ++i) acc += pi[i] * at(i, k);
        pi[k] = acc;
    }
    return pi;
}

}  // namespace slowq
