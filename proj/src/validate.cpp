#include "slowq/validate.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "slowq/boundary.hpp"
#include "slowq/erlang.hpp"
#include "slowq/oracle.hpp"
#include "slowq/qed.hpp"
#include "slowq/rate_matrices.hpp"
#include "slowq/rng.hpp"
#include "slowq/sim.hpp"
#include "slowq/solver.hpp"
#include "slowq/variants.hpp"

namespace slowq {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rate_matrix_residual(const ModelParams& p) {
    const GeneratorBlocks b = generator_blocks(p);
    const Matrix R = compute_R(b, p);
    const Matrix res = b.lambda1 + R * b.lambda0 + R * R * b.lambdam1;
    return res.cwiseAbs().rowwise().sum().maxCoeff() /
           b.lambda0.cwiseAbs().rowwise().sum().maxCoeff();
}

double g_row_sum_error(const ModelParams& p) {
    const GeneratorBlocks b = generator_blocks(p);
    const Matrix G = compute_G(b, compute_R(b, p));
    return (G.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

// Worst relative per-state disagreement between the matrix-analytic solve
// and the truncated-generator oracle.
double oracle_disagreement(const ModelParams& p) {
    const StationaryDistribution exact = solve_stationary(p);
    const StationaryDistribution ref = truncated_generator_solve(p, 1e-13);
    double worst = 0.0;
    const int top = ref.top_level();
    for (int i = 0; i <= top; ++i) {
        for (int j = 0; j <= std::min(i, p.s); ++j) {
            const double a = exact.p(i, j);
            const double b = ref.p(i, j);
            const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
            if (scale < 1e-14) continue;  // below truncation noise
            worst = std::max(worst, std::abs(a - b) / scale);
        }
    }
    return worst;
}

double max_balance_residual(const StationaryDistribution& dist, double delta = 0.0) {
    const ModelParams& p = dist.params;
    const int top = dist.geometric() ? p.s + 60 : dist.top_level();
    double worst = 0.0;
    for (int i = 0; i <= top; ++i) {
        const int jmax = std::min(i, p.s);
        for (int j = 0; j <= jmax; ++j) {
            const double aband = i > p.s ? (i - p.s) * delta : 0.0;
            double out = (std::min(i, p.s) - j) * p.mu_slow + j * p.mu_fast + aband;
            const bool top_wall = !dist.geometric() && i == dist.top_level();
            if (!top_wall) out += p.lambda;
            double in = 0.0;
            if (i > 0) {
                if (i - 1 < p.s) {
                    if (j > 0) in += dist.p(i - 1, j - 1) * p.lambda;
                } else {
                    in += dist.p(i - 1, j) * p.lambda;
                }
            }
            if (dist.geometric() || i < dist.top_level()) {
                const double aband_up = i + 1 > p.s ? (i + 1 - p.s) * delta : 0.0;
                in += dist.p(i + 1, j) *
                      ((std::min(i + 1, p.s) - j) * p.mu_slow + aband_up);
                if (j + 1 <= std::min(i + 1, p.s))
                    in += dist.p(i + 1, j + 1) * (j + 1) * p.mu_fast;
            }
            const double scale = std::max(dist.p(i, j) * out, 1e-300);
            if (dist.p(i, j) < 1e-13) continue;
            worst = std::max(worst, std::abs(in - dist.p(i, j) * out) / scale);
        }
    }
    return worst;
}

struct Suite {
    std::vector<ValidationCheck>& out;

    void check(const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
        ValidationCheck c;
        c.name = name;
        try {
            auto [ok, detail] = fn();
            c.passed = ok;
            c.detail = detail;
        } catch (const std::exception& e) {
            c.passed = false;
            c.detail = std::string("exception: ") + e.what();
        }
        out.push_back(std::move(c));
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

}  // namespace

std::vector<ValidationCheck> run_validation_suite(const std::string& tier) {
    if (tier != "quick" && tier != "full")
        throw std::invalid_argument("unknown tier '" + tier + "' (use quick or full)");
    const bool full = tier == "full";

    std::vector<ValidationCheck> results;
    Suite suite{results};

    suite.check("generator blocks conserve rates", [] {
        for (int s : {1, 7, 25}) {
            const ModelParams p = params_from_loads(s, s, 0.7, 0.95);
            const GeneratorBlocks b = generator_blocks(p);
            const Matrix sum = b.lambda1 + b.lambda0 + b.lambdam1;
            const double worst = sum.rowwise().sum().cwiseAbs().maxCoeff();
            if (worst > 1e-13 * b.lambda0.cwiseAbs().maxCoeff())
                return std::make_pair(false, std::string("row sum ") + std::to_string(worst) +
                                                 " at s=" + std::to_string(s));
        }
        return std::make_pair(true, std::string());
    });

    suite.check("rate matrix residuals <= 1e-12", [&] {
        double worst = 0.0;
        for (int s : {1, 5, 15, 50}) {
            const ModelParams p = params_from_loads(s, s, 0.7, 0.95);
            worst = std::max(worst, rate_matrix_residual(p));
        }
        return std::make_pair(worst <= 1e-12, "worst " + fmt(worst));
    });

    suite.check("G rows stochastic within 1e-10", [&] {
        double worst = 0.0;
        for (int s : {1, 5, 15, 50}) {
            const ModelParams p = params_from_loads(s, s, 0.7, 0.95);
            worst = std::max(worst, g_row_sum_error(p));
        }
        return std::make_pair(worst <= 1e-10, "worst " + fmt(worst));
    });

    suite.check("first-passage tables complete", [] {
        const ModelParams p = params_from_loads(8, 8, 0.6, 0.9);
        const ThetaTable th = theta_table(p);
        for (int i = 0; i < p.s; ++i)
            for (int j = 0; j <= i; ++j) {
                double sum = 0.0;
                for (int k = 0; k <= i - j; ++k) sum += th(k, i, j);
                if (std::abs(sum - 1.0) > 1e-10)
                    return std::make_pair(false,
                                          "theta mass " + fmt(sum) + " at (" +
                                              std::to_string(i) + "," + std::to_string(j) + ")");
            }
        const PsiTable ps = psi_table(p, th);
        const Matrix up = ps.level_up(p.s);
        for (int j = 0; j < p.s; ++j)
            if (std::abs(up.row(j).sum() - 1.0) > 1e-10)
                return std::make_pair(false, "psi row " + std::to_string(j) + " mass " +
                                                 fmt(up.row(j).sum()));
        return std::make_pair(true, std::string());
    });

    suite.check("matrix-analytic vs truncated-generator oracle", [&] {
        SplitMix64 rng(20240513);
        double worst = 0.0;
        const std::vector<int> sizes = full ? std::vector<int>{1, 2, 3, 5, 8}
                                            : std::vector<int>{1, 3, 5};
        const int sets = full ? 4 : 3;
        for (int s : sizes)
            for (int rep = 0; rep < sets; ++rep) {
                const double rho_slow = 0.55 + 0.35 * rng.uniform01();
                const double rho_fast = rho_slow * (0.35 + 0.55 * rng.uniform01());
                const ModelParams p = params_from_loads(s, 1.0 + 4.0 * rng.uniform01(),
                                                        rho_fast, rho_slow);
                worst = std::max(worst, oracle_disagreement(p));
            }
        return std::make_pair(worst <= 1e-9, "worst rel diff " + fmt(worst));
    });

    suite.check("global balance at every state", [] {
        const StationaryDistribution d = solve_stationary(params_from_loads(15, 15, 0.7, 0.98));
        const double worst = max_balance_residual(d);
        return std::make_pair(worst <= 1e-9, "worst rel residual " + fmt(worst));
    });

    suite.check("M/M/s reduction limit", [] {
        double worst = 0.0;
        for (int s : {4, 11}) {
            const double mu = 1.0;
            const ModelParams p = build_params(s, 0.85 * s, mu * (1.0 + 1e-9), mu);
            const StationaryDistribution d = solve_stationary(p);
            const MmsMetrics ref = mms_metrics(s, p.lambda, mu);
            worst = std::max(worst, std::abs(d.p_wait() - ref.p_wait) / ref.p_wait);
            worst = std::max(worst, std::abs(d.mean_queue() - ref.mean_queue) / ref.mean_queue);
        }
        return std::make_pair(worst <= 1e-6, "worst rel err " + fmt(worst));
    });

    suite.check("pathwise coupling dominance", [&] {
        const int seeds = full ? 100 : 5;
        const long long customers = full ? 100000 : 20000;
        long long violations = 0;
        for (auto [rf, rs] : {std::pair{0.7, 0.95}, std::pair{0.85, 0.92}}) {
            for (int k = 0; k < seeds; ++k) {
                SimConfig cfg;
                cfg.params = params_from_loads(9, 9, rf, rs);
                cfg.customers = customers;
                cfg.seed = 1000 + static_cast<std::uint64_t>(k);
                const CouplingReport rep = simulate_coupled(cfg);
                violations += rep.violations_ws_ge_w + rep.violations_w_ge_wf +
                              rep.violations_xs_ge_x + rep.violations_x_ge_xf;
            }
        }
        return std::make_pair(violations == 0, std::to_string(violations) + " violations");
    });

    suite.check("diffusion densities normalized and continuous", [] {
        for (auto [beta, gamma] : {std::pair{0.5, 0.5}, std::pair{0.3, 1.1}, std::pair{1.4, 0.2}}) {
            const QedParams q{beta, gamma, 1.0};
            for (BoundSystem sys : {BoundSystem::fast, BoundSystem::slow}) {
                // trapezoid + analytic exponential tail; the density is smooth
                // on each side of zero
                const int n = 40000;
                const double lo = -12.0, hi = 0.0;
                double integral = 0.0;
                for (int i = 0; i < n; ++i) {
                    const double x0 = lo + (hi - lo) * i / n;
                    const double x1 = lo + (hi - lo) * (i + 1) / n;
                    integral += 0.5 * (diffusion_density(sys, q, x0) + diffusion_density(sys, q, x1)) *
                                (x1 - x0);
                }
                const double b = sys == BoundSystem::fast ? beta + gamma : beta;
                const double c = b / (b + normal_pdf(b) / normal_cdf(b));
                integral += (1.0 - c);  // exact mass above zero
                if (std::abs(integral - 1.0) > 1e-6)
                    return std::make_pair(false, "integral " + fmt(integral));
                const double left = diffusion_density(sys, q, 0.0);
                const double right = diffusion_density(sys, q, 1e-300);
                if (std::abs(left - right) > 1e-10)
                    return std::make_pair(false, "jump at zero " + fmt(left - right));
            }
        }
        return std::make_pair(true, std::string());
    });

    suite.check("QED delay sandwich", [&] {
        const QedParams q{0.5, 0.5, 1.0};
        const std::vector<int> grid = full ? std::vector<int>{25, 50, 100}
                                           : std::vector<int>{25, 50};
        for (const QedTableRow& row : qed_convergence_table(q, grid)) {
            if (!(row.p_wait_fast <= row.p_wait_slowdown + 1e-12 &&
                  row.p_wait_slowdown <= row.p_wait_slow + 1e-12))
                return std::make_pair(false, "ordering broken at s=" + std::to_string(row.s));
        }
        return std::make_pair(true, std::string());
    });

    suite.check("loss system (N = s) collapses to Erlang B", [] {
        const int s = 6;
        const ModelParams base = params_from_loads(s, s, 0.75, 1.1);
        const StationaryDistribution d = solve_finite_buffer({base, s});
        const double a = base.lambda / base.mu_fast;
        // diagonal Erlang-B weights
        double total = 0.0, w = 1.0;
        std::vector<double> ref(static_cast<std::size_t>(s) + 1);
        for (int i = 0; i <= s; ++i) {
            if (i > 0) w *= a / i;
            ref[static_cast<std::size_t>(i)] = w;
            total += w;
        }
        for (int i = 0; i <= s; ++i) {
            const double want = ref[static_cast<std::size_t>(i)] / total;
            const double got = i < s ? d.p(i, i) : d.p_s(s);
            if (std::abs(want - got) > 1e-11)
                return std::make_pair(false, "level " + std::to_string(i) + " off by " +
                                                 fmt(got - want));
        }
        return std::make_pair(true, std::string());
    });

    suite.check("abandonment solve vs oracle", [] {
        const ModelParams base = params_from_loads(3, 3, 0.6, 0.8);
        const AbandonmentParams ab{base, 0.5, 1e-10};
        const StationaryDistribution a = solve_abandonment(ab);
        const StationaryDistribution b = truncated_generator_solve(ab, 1e-13);
        double worst = 0.0;
        for (int i = 0; i <= b.top_level(); ++i)
            for (int j = 0; j <= std::min(i, base.s); ++j) {
                const double pa = a.p(i, j), pb = b.p(i, j);
                if (pb < 1e-13) continue;
                worst = std::max(worst, std::abs(pa - pb) / pb);
            }
        return std::make_pair(worst <= 1e-9, "worst rel diff " + fmt(worst));
    });

    if (full) {
        suite.check("staffing table (16 rows)", [] {
            struct Row {
                double mu_slow, lambda, target;
                int s_fast, s_slowdown;
            };
            const Row rows[] = {
                {0.9, 10, 0.1, 16, 16}, {0.9, 12, 0.1, 18, 18}, {0.9, 15, 0.1, 22, 22},
                {0.9, 20, 0.1, 27, 28}, {0.9, 10, 0.5, 12, 13}, {0.9, 12, 0.5, 14, 15},
                {0.9, 15, 0.5, 18, 19}, {0.9, 20, 0.5, 23, 24}, {0.7, 10, 0.1, 16, 17},
                {0.7, 12, 0.1, 18, 19}, {0.7, 15, 0.1, 22, 23}, {0.7, 20, 0.1, 27, 30},
                {0.7, 10, 0.5, 12, 15}, {0.7, 12, 0.5, 14, 18}, {0.7, 15, 0.5, 18, 22},
                {0.7, 20, 0.5, 23, 29}};
            for (const Row& r : rows) {
                const DimensioningResult got =
                    dimension_servers(1.0, r.mu_slow, r.lambda, r.target);
                if (got.s_fast != r.s_fast || got.s_slowdown != r.s_slowdown)
                    return std::make_pair(
                        false, "lambda=" + std::to_string(r.lambda) + " muS=" +
                                   std::to_string(r.mu_slow) + ": got (" +
                                   std::to_string(got.s_fast) + "," +
                                   std::to_string(got.s_slowdown) + ")");
            }
            return std::make_pair(true, std::string());
        });

        suite.check("s = 200 solve under 60 s", [] {
            const auto t0 = Clock::now();
            const ModelParams p = params_from_loads(200, 200, 0.7, 0.95);
            const StationaryDistribution d = solve_stationary(p);
            const double el = seconds_since(t0);
            const double res = rate_matrix_residual(p);
            const bool ok = el < 60.0 && res <= 1e-12 && d.p_wait() > 0.0 && d.p_wait() < 1.0;
            return std::make_pair(ok, "took " + fmt(el) + " s, residual " + fmt(res));
        });
    }

    return results;
}

}  // namespace slowq
