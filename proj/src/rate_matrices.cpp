#include "slowq/rate_matrices.hpp"

#include <cmath>
#include <string>

#include "slowq/errors.hpp"

namespace slowq {

namespace {
constexpr double kDenominatorFloor = 1e-14;
}

Matrix compute_R(const GeneratorBlocks& blocks, const ModelParams& params) {
    (void)blocks;
    if (!(params.rho_slow < 1.0))
        throw NumericalError("compute_R",
                             "rho_slow = " + std::to_string(params.rho_slow) +
                                 " >= 1, rate matrix does not exist");

    const int s = params.s;
    const double la = params.lambda;
    const double muF = params.mu_fast;
    const double muS = params.mu_slow;

    Matrix R = Matrix::Zero(s + 1, s + 1);

    // Diagonal: minimal root of a r^2 - b r + c = 0 with a = (s-j) muS,
    // b = la + a + f, f = j muF, c = la. Written as 2c / (b + sqrt(disc)) to
    // avoid cancellation when 4ac << b^2; the discriminant itself expands to
    // (la - a)^2 + f (f + 2 la + 2 a), a sum of nonnegative terms, so it
    // stays accurate (and nonnegative) arbitrarily close to criticality.
    for (int j = 0; j < s; ++j) {
        const double a = (s - j) * muS;
        const double f = j * muF;
        const double b = la + a + f;
        const double disc = (la - a) * (la - a) + f * (f + 2.0 * la + 2.0 * a);
        R(j, j) = 2.0 * la / (b + std::sqrt(disc));
    }
    R(s, s) = la / (la + s * muF);

    // Subdiagonals, h = i - j sweeping outward; each entry only references
    // entries from strictly smaller h.
    for (int h = 1; h <= s; ++h) {
        for (int i = h; i <= s; ++i) {
            const int j = i - h;
            double num = 0.0;
            for (int k = j + 1; k <= i - 1; ++k) num += R(i, k) * R(k, j) * (s - j) * muS;
            for (int k = j + 1; k <= i; ++k) num += R(i, k) * R(k, j + 1) * (j + 1) * muF;
            const double den =
                la + (s - j) * muS + j * muF - (R(i, i) + R(j, j)) * (s - j) * muS;
            if (!(std::abs(den) > kDenominatorFloor))
                throw NumericalError("compute_R", "degenerate parameters: subdiagonal "
                                                  "denominator vanished at (" +
                                                      std::to_string(i) + "," +
                                                      std::to_string(j) + ")");
            R(i, j) = num / den;
        }
    }
    return R;
}

Matrix compute_G(const GeneratorBlocks& blocks, const Matrix& R) {
    const double la = blocks.lambda1(0, 0);
    return (R * blocks.lambdam1) / la;
}

Matrix invert_I_minus_R(const Matrix& R) {
    const int n = static_cast<int>(R.rows());
    Matrix inv = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        const double d = 1.0 - R(j, j);
        if (!(d > kDenominatorFloor))
            throw NumericalError("invert_I_minus_R",
                                 "1 - R(j,j) <= 1e-14 at j = " + std::to_string(j) +
                                     "; parameters are at the edge of stability");
        inv(j, j) = 1.0 / d;
    }
    for (int i = 1; i < n; ++i) {
        for (int j = i - 1; j >= 0; --j) {
            double acc = 0.0;
            for (int k = j; k < i; ++k) acc += R(i, k) * inv(k, j);
            inv(i, j) = acc / (1.0 - R(i, i));
        }
    }
    return inv;
}

RateMatrices rate_matrices(const GeneratorBlocks& blocks, const ModelParams& params) {
    RateMatrices rm;
    rm.R = compute_R(blocks, params);
    rm.G = compute_G(blocks, rm.R);
    rm.inv_I_minus_R = invert_I_minus_R(rm.R);
    return rm;
}

}  // namespace slowq
