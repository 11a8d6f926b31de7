#pragma once

#include <Eigen/Dense>

namespace slowq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Parameters of the threshold slowdown queue: s exponential servers,
/// Poisson arrivals with rate lambda, service rate mu_fast for customers
/// that started service without delay and mu_slow (< mu_fast) for
/// customers that had to wait.
struct ModelParams {
    int s = 0;
    double lambda = 0.0;
    double mu_fast = 0.0;
    double mu_slow = 0.0;
    double rho_fast = 0.0;  // lambda / (s * mu_fast)
    double rho_slow = 0.0;  // lambda / (s * mu_slow)
};

/// Validates and derives loads. Stability (rho_slow < 1) is deliberately not
/// enforced here; the finite-buffer and abandonment variants accept
/// rho_slow >= 1.
ModelParams build_params(int s, double lambda, double mu_fast, double mu_slow);

/// Load-based parameterization: mu_fast = lambda / (s * rho_fast) and
/// likewise for the slow rate.
ModelParams params_from_loads(int s, double lambda, double rho_fast, double rho_slow);

/// The three level-transition blocks of the generator for levels above s.
/// Rows and columns are indexed by the phase j = number of non-delayed
/// customers in service, 0..s.
struct GeneratorBlocks {
    Matrix lambda1;   // up one level: lambda * I
    Matrix lambda0;   // within level: -(lambda + (s-j) mu_slow + j mu_fast) on the diagonal
    Matrix lambdam1;  // down one level: (s-j) mu_slow diagonal, j mu_fast subdiagonal
};

GeneratorBlocks generator_blocks(const ModelParams& params);

/// Neuts drift condition; reduces to rho_slow < 1.
bool check_ergodicity(const ModelParams& params);

}  // namespace slowq
