#pragma once

// Test-only oracles, kept independent of the production recursions: first
// passage probabilities through dense absorbing-chain linear solves, plain
// quadrature, and randomized parameter generators.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "slowq/model.hpp"
#include "slowq/rng.hpp"

namespace testsupport {

using slowq::ModelParams;

// Absorption split for the theta definition: starting from (i0, j0) in the
// boundary, the chain is absorbed the first time phase j0+1 is entered,
// which happens via an arrival out of some state (m, j0). Returns
// theta_k(i0,j0) for k = 0..i0-j0, by solving the linear system on the
// reachable sub-triangle.
inline std::vector<double> theta_oracle(const ModelParams& p, int i0, int j0) {
    const int d0 = i0 - j0;
    auto idx = [&](int i, int j) { return j * (d0 + 1) + (i - j); };  // j<=j0, i-j<=d0
    const int n = (j0 + 1) * (d0 + 1);

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, d0 + 1);  // columns: absorbing level offset
    for (int j = 0; j <= j0; ++j) {
        for (int dd = 0; dd <= d0; ++dd) {
            const int i = j + dd;
            const int row = idx(i, j);
            const double D = p.lambda + dd * p.mu_slow + j * p.mu_fast;
            A(row, row) = D;
            if (j < j0) {
                A(row, idx(i + 1, j + 1)) -= p.lambda;
            } else {
                // absorbed at level i+1, i.e. k = i0 - i; store by m = i
                B(row, i - j0) += p.lambda;
            }
            if (dd > 0) A(row, idx(i - 1, j)) -= dd * p.mu_slow;
            if (j > 0) A(row, idx(i - 1, j - 1)) -= j * p.mu_fast;
        }
    }
    const Eigen::MatrixXd H = A.partialPivLu().solve(B);

    std::vector<double> theta(static_cast<std::size_t>(d0) + 1, 0.0);
    for (int m = j0; m <= i0; ++m)  // absorption at (m+1, j0+1) means k = i0 - m
        theta[static_cast<std::size_t>(i0 - m)] = H(idx(i0, j0), m - j0);
    return theta;
}

// First passage to level k: absorbed on any arrival out of level k-1;
// returns for each start state (i,j) with j <= i <= k-1 the distribution of
// the absorption phase l. Access: result[{i,j}][l].
inline std::map<std::pair<int, int>, std::vector<double>> psi_oracle(const ModelParams& p,
                                                                     int k) {
    auto idx = [](int i, int j) { return i * (i + 1) / 2 + j; };
    const int n = k * (k + 1) / 2;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, k + 1);
    for (int i = 0; i <= k - 1; ++i) {
        for (int j = 0; j <= i; ++j) {
            const int row = idx(i, j);
            const double D = p.lambda + (i - j) * p.mu_slow + j * p.mu_fast;
            A(row, row) = D;
            if (i + 1 == k)
                B(row, j + 1) += p.lambda;  // absorbed at (k, j+1)
            else
                A(row, idx(i + 1, j + 1)) -= p.lambda;
            if (i > j) A(row, idx(i - 1, j)) -= (i - j) * p.mu_slow;
            if (j > 0) A(row, idx(i - 1, j - 1)) -= j * p.mu_fast;
        }
    }
    const Eigen::MatrixXd H = A.partialPivLu().solve(B);

    std::map<std::pair<int, int>, std::vector<double>> out;
    for (int i = 0; i <= k - 1; ++i)
        for (int j = 0; j <= i; ++j) {
            std::vector<double> row(static_cast<std::size_t>(k) + 1, 0.0);
            for (int l = 0; l <= k; ++l) row[static_cast<std::size_t>(l)] = H(idx(i, j), l);
            out[{i, j}] = std::move(row);
        }
    return out;
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int depth = 40) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    std::function<double(double, double, double, double, double, double, int)> rec =
        [&](double x0, double x2, double f0, double f1, double f2, double eps,
            int d) -> double {
        const double x1l = 0.5 * (x0 + 0.5 * (x0 + x2));
        const double xm = 0.5 * (x0 + x2);
        const double x1r = 0.5 * (xm + x2);
        const double fl = f(x1l), fr = f(x1r);
        const double whole = (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2);
        const double left = (xm - x0) / 6.0 * (f0 + 4.0 * fl + f1);
        const double right = (x2 - xm) / 6.0 * (f1 + 4.0 * fr + f2);
        if (d <= 0 || std::abs(left + right - whole) < 15.0 * eps)
            return left + right + (left + right - whole) / 15.0;
        return rec(x0, xm, f0, fl, f1, 0.5 * eps, d - 1) +
               rec(xm, x2, f1, fr, f2, 0.5 * eps, d - 1);
    };
    return rec(a, b, fa, fm, fb, tol, depth);
}

// Random stable parameter set with rho_slow in [lo_s, hi_s].
inline ModelParams random_stable_params(slowq::SplitMix64& rng, int s, double lo_s = 0.6,
                                        double hi_s = 0.95) {
    const double rho_slow = lo_s + (hi_s - lo_s) * rng.uniform01();
    const double rho_fast = rho_slow * (0.35 + 0.55 * rng.uniform01());
    const double lambda = 0.5 + 4.5 * rng.uniform01();
    return slowq::params_from_loads(s, lambda, rho_fast, rho_slow);
}

}  // namespace testsupport
