#include "slowq/model.hpp"

#include <stdexcept>
#include <string>

namespace slowq {

ModelParams build_params(int s, double lambda, double mu_fast, double mu_slow) {
    if (s < 1)
        throw std::invalid_argument("build_params: server count s must be >= 1, got " +
                                    std::to_string(s));
    if (!(lambda > 0.0))
        throw std::invalid_argument("build_params: lambda must be positive");
    if (!(mu_fast > 0.0) || !(mu_slow > 0.0))
        throw std::invalid_argument("build_params: service rates must be positive");
    if (!(mu_fast > mu_slow))
        throw std::invalid_argument(
            "build_params: mu_fast must exceed mu_slow (strict slowdown required)");

    ModelParams p;
    p.s = s;
    p.lambda = lambda;
    p.mu_fast = mu_fast;
    p.mu_slow = mu_slow;
    p.rho_fast = lambda / (s * mu_fast);
    p.rho_slow = lambda / (s * mu_slow);
    return p;
}

ModelParams params_from_loads(int s, double lambda, double rho_fast, double rho_slow) {
    if (!(rho_fast > 0.0) || !(rho_slow > 0.0))
        throw std::invalid_argument("params_from_loads: loads must be positive");
    if (!(rho_fast < rho_slow))
        throw std::invalid_argument("params_from_loads: rho_fast must be below rho_slow");
    if (s < 1) throw std::invalid_argument("params_from_loads: s must be >= 1");
    if (!(lambda > 0.0)) throw std::invalid_argument("params_from_loads: lambda must be positive");
    return build_params(s, lambda, lambda / (s * rho_fast), lambda / (s * rho_slow));
}

GeneratorBlocks generator_blocks(const ModelParams& params) {
    const int n = params.s + 1;
    GeneratorBlocks b;
    b.lambda1 = Matrix::Identity(n, n) * params.lambda;
    b.lambda0 = Matrix::Zero(n, n);
    b.lambdam1 = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        const double slow_pool = (params.s - j) * params.mu_slow;
        const double fast_pool = j * params.mu_fast;
        b.lambda0(j, j) = -(params.lambda + slow_pool + fast_pool);
        b.lambdam1(j, j) = slow_pool;  // zero at j = s
        if (j > 0) b.lambdam1(j, j - 1) = fast_pool;
    }
    return b;
}

bool check_ergodicity(const ModelParams& params) {
    // pi = (1,0,...,0) solves pi (L1 + L0 + Lm1) = 0; the drift condition
    // pi L1 1 < pi Lm1 1 is lambda < s mu_slow.
    return params.rho_slow < 1.0;
}

}  // namespace slowq
