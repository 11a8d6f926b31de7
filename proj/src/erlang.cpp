#include "slowq/erlang.hpp"

#include <stdexcept>
#include <string>

namespace slowq {

double erlang_b(int s, double a) {
    if (s < 0 || !(a > 0.0)) throw std::invalid_argument("erlang_b: need s >= 0, a > 0");
    double b = 1.0;
    for (int k = 1; k <= s; ++k) b = a * b / (k + a * b);
    return b;
}

double erlang_c(int s, double a) {
    if (!(a < s))
        throw std::invalid_argument("erlang_c: offered load " + std::to_string(a) +
                                    " must be below s = " + std::to_string(s));
    const double b = erlang_b(s, a);
    const double rho = a / s;
    return b / (1.0 - rho * (1.0 - b));
}

MmsMetrics mms_metrics(int s, double lambda, double mu) {
    const double a = lambda / mu;
    MmsMetrics m;
    m.p_wait = erlang_c(s, a);
    const double rho = a / s;
    m.mean_queue = m.p_wait * rho / (1.0 - rho);
    m.mean_system = m.mean_queue + a;  // E[busy servers] = a by PASTA/rate balance
    return m;
}

std::vector<double> mms_distribution(int s, double lambda, double mu, int i_max) {
    const double a = lambda / mu;
    const double rho = a / s;
    if (!(rho < 1.0)) throw std::invalid_argument("mms_distribution: unstable queue");

    // Unnormalized weights via the ratio recursion, then normalize including
    // the closed-form geometric tail so the result is exact regardless of
    // i_max.
    std::vector<double> w(static_cast<std::size_t>(std::max(i_max, s)) + 1, 0.0);
    w[0] = 1.0;
    double total = 1.0;
    double cur = 1.0;
    for (int i = 1; i < static_cast<int>(w.size()); ++i) {
        cur *= (i <= s) ? a / i : rho;
        w[static_cast<std::size_t>(i)] = cur;
        total += cur;
    }
    // Remaining tail above the last computed level is geometric with ratio rho.
    total += w.back() * rho / (1.0 - rho);

    std::vector<double> p(static_cast<std::size_t>(i_max) + 1);
    for (int i = 0; i <= i_max; ++i) p[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] / total;
    return p;
}

}  // namespace slowq
