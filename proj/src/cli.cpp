#include "slowq/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "slowq/erlang.hpp"
#include "slowq/errors.hpp"
#include "slowq/oracle.hpp"
#include "slowq/qed.hpp"
#include "slowq/sim.hpp"
#include "slowq/solver.hpp"
#include "slowq/validate.hpp"
#include "slowq/variants.hpp"

namespace slowq {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct ModelFlags {
    int s = 0;
    double lambda = 0.0;
    double mu_fast = 0.0;
    double mu_slow = 0.0;
    double rho_fast = 0.0;
    double rho_slow = 0.0;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
    cmd->add_option("-s,--servers", f.s, "Number of servers")->required();
    cmd->add_option("--lambda", f.lambda, "Poisson arrival rate")->required();
    auto* mf = cmd->add_option("--mu-fast", f.mu_fast,
                               "Service rate of customers taken into service without delay");
    auto* ms = cmd->add_option("--mu-slow", f.mu_slow,
                               "Service rate of customers that waited (mu_slow < mu_fast)");
    auto* rf = cmd->add_option(
        "--rho-fast", f.rho_fast,
        "Load lambda/(s*mu_fast); implies mu_fast = lambda/(s*rho_fast)");
    auto* rs = cmd->add_option(
        "--rho-slow", f.rho_slow,
        "Load lambda/(s*mu_slow); implies mu_slow = lambda/(s*rho_slow)");
    mf->excludes(rf)->excludes(rs)->needs(ms);
    ms->excludes(rf)->excludes(rs)->needs(mf);
    rf->needs(rs);
    rs->needs(rf);
}

ModelParams make_params(const CLI::App* cmd, const ModelFlags& f) {
    const bool rates = cmd->count("--mu-fast") > 0;
    const bool loads = cmd->count("--rho-fast") > 0;
    if (rates == loads)
        throw CLI::ValidationError(
            "--mu-fast/--mu-slow | --rho-fast/--rho-slow",
            "exactly one of the rate or load parameterizations is required");
    if (rates) return build_params(f.s, f.lambda, f.mu_fast, f.mu_slow);
    return params_from_loads(f.s, f.lambda, f.rho_fast, f.rho_slow);
}

Json params_json(const ModelParams& p) {
    Json j;
    j["s"] = p.s;
    j["lambda"] = p.lambda;
    j["mu_fast"] = p.mu_fast;
    j["mu_slow"] = p.mu_slow;
    j["rho_fast"] = p.rho_fast;
    j["rho_slow"] = p.rho_slow;
    return j;
}

Json report_json(const PerformanceReport& r) {
    Json j;
    j["p_wait"] = r.p_wait;
    j["mean_queue"] = r.mean_queue;
    j["mean_system"] = r.mean_system;
    j["rho"] = r.rho;
    j["rho_minus_rho_fast"] = r.rho_minus_rho_fast;
    j["p_empty"] = r.p_empty;
    return j;
}

Json wrap(Json params, Json results) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["params"] = std::move(params);
    j["results"] = std::move(results);
    return j;
}

int emit(const std::string& payload, const std::string& path, std::ostream& out,
         std::ostream& err) {
    if (path.empty() || path == "-") {
        out << payload;
        return 0;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        err << "error: cannot open output file '" << path << "'\n";
        return 1;
    }
    file << payload;
    return 0;
}

std::string report_csv(const PerformanceReport& r) {
    std::ostringstream os;
    os << "p_wait,mean_queue,mean_system,rho,rho_minus_rho_fast,p_empty\n"
       << fmt17(r.p_wait) << ',' << fmt17(r.mean_queue) << ',' << fmt17(r.mean_system)
       << ',' << fmt17(r.rho) << ',' << fmt17(r.rho_minus_rho_fast) << ','
       << fmt17(r.p_empty) << '\n';
    return os.str();
}

Json modes_json(const MarginalDistribution& marginal) {
    Json arr = Json::array();
    for (const auto& [i, p] : find_modes(marginal)) {
        Json m;
        m["i"] = i;
        m["probability"] = p;
        arr.push_back(std::move(m));
    }
    return arr;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact and asymptotic analysis of the M/M/s queue with threshold "
                 "customer slowdown"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string output;
    std::string format = "json";
    app.add_option("-o,--output", output, "Output file (default: stdout)");
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));

    // ---- solve ------------------------------------------------------------
    auto* solve_cmd =
        app.add_subcommand("solve", "Stationary distribution and performance measures");
    ModelFlags solve_flags;
    add_model_flags(solve_cmd, solve_flags);

    // ---- marginal ----------------------------------------------------------
    auto* marginal_cmd =
        app.add_subcommand("marginal", "Distribution of the total number in system");
    ModelFlags marginal_flags;
    add_model_flags(marginal_cmd, marginal_flags);
    int marginal_imax = -1;
    int marginal_buffer = 0;
    double marginal_delta = 0.0;
    marginal_cmd->add_option("--i-max", marginal_imax,
                             "Largest level to report (default: tail below 1e-10)");
    auto* mb = marginal_cmd->add_option("--buffer", marginal_buffer,
                                        "Finite buffer size N (variant model)");
    auto* md = marginal_cmd->add_option("--delta", marginal_delta,
                                        "Abandonment rate per waiting customer (variant model)");
    mb->excludes(md);

    // ---- heatmap -----------------------------------------------------------
    auto* heatmap_cmd =
        app.add_subcommand("heatmap", "Joint probabilities p(i,j) in long CSV form");
    ModelFlags heatmap_flags;
    add_model_flags(heatmap_cmd, heatmap_flags);
    int heatmap_imax = -1;
    heatmap_cmd->add_option("--i-max", heatmap_imax, "Largest level to export");

    // ---- dimension ---------------------------------------------------------
    auto* dim_cmd = app.add_subcommand(
        "dimension", "Minimal servers to reach a target delay probability");
    double dim_mu_fast = 0.0, dim_mu_slow = 0.0, dim_lambda = 0.0, dim_target = 0.0;
    dim_cmd->add_option("--mu-fast", dim_mu_fast)->required();
    dim_cmd->add_option("--mu-slow", dim_mu_slow)->required();
    dim_cmd->add_option("--lambda", dim_lambda)->required();
    dim_cmd->add_option("--target", dim_target, "Target P(W>0)")->required();

    // ---- finite-buffer -----------------------------------------------------
    auto* fb_cmd = app.add_subcommand("finite-buffer",
                                      "Variant with at most N customers in the system");
    ModelFlags fb_flags;
    add_model_flags(fb_cmd, fb_flags);
    int fb_buffer = 0;
    fb_cmd->add_option("--buffer", fb_buffer, "Buffer size N >= s")->required();

    // ---- abandon -----------------------------------------------------------
    auto* ab_cmd =
        app.add_subcommand("abandon", "Variant with per-customer abandonment rate delta");
    ModelFlags ab_flags;
    add_model_flags(ab_cmd, ab_flags);
    double ab_delta = 0.0;
    double ab_tail = 1e-10;
    ab_cmd->add_option("--delta", ab_delta, "Abandonment rate per waiting customer")
        ->required();
    ab_cmd->add_option("--truncation-tail", ab_tail,
                       "Certification tolerance for the truncation level");

    // ---- qed ---------------------------------------------------------------
    auto* qed_cmd = app.add_subcommand(
        "qed", "Square-root scaled systems: delay probabilities and limiting bounds");
    double qed_beta = 0.0, qed_gamma = 0.0, qed_mu_slow = 1.0;
    std::vector<int> qed_sizes;
    qed_cmd->add_option("--beta", qed_beta, "Arrival slack coefficient")->required();
    qed_cmd->add_option("--gamma", qed_gamma, "Service-rate gap coefficient")->required();
    qed_cmd->add_option("--mu-slow", qed_mu_slow, "Slow service rate (default 1)");
    qed_cmd->add_option("--s", qed_sizes, "Server counts, comma separated")
        ->required()
        ->delimiter(',');

    // ---- simulate ----------------------------------------------------------
    auto* sim_cmd = app.add_subcommand("simulate", "Event-driven simulation of (X, Y)");
    ModelFlags sim_flags;
    add_model_flags(sim_cmd, sim_flags);
    SimConfig sim_cfg;
    std::string sample_path_file;
    sim_cmd->add_option("--horizon", sim_cfg.horizon, "Simulated time units");
    sim_cmd->add_option("--warmup", sim_cfg.warmup, "Warmup time (default 10% of horizon)");
    sim_cmd->add_option("--seed", sim_cfg.seed, "RNG seed");
    sim_cmd->add_option("--replications", sim_cfg.replications, "Independent replications");
    sim_cmd->add_option("--initial", sim_cfg.initial_customers, "Customers at time zero");
    sim_cmd->add_option("--sample-path", sample_path_file,
                        "Write the (t, X, Y) trajectory of one replication to this CSV");

    // ---- couple ------------------------------------------------------------
    auto* couple_cmd = app.add_subcommand(
        "couple", "Coupled slow/slowdown/fast run checking pathwise dominance");
    ModelFlags couple_flags;
    add_model_flags(couple_cmd, couple_flags);
    long long couple_customers = 100000;
    std::uint64_t couple_seed = 1;
    int couple_seeds = 1;
    couple_cmd->add_option("--customers", couple_customers, "Customers per seed");
    couple_cmd->add_option("--seed", couple_seed, "First RNG seed");
    couple_cmd->add_option("--seeds", couple_seeds, "Number of consecutive seeds");

    // ---- validate ----------------------------------------------------------
    auto* validate_cmd =
        app.add_subcommand("validate", "Run the built-in verification battery");
    std::string tier = "quick";
    validate_cmd->add_option("--tier", tier, "quick or full");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("slowq");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (solve_cmd->parsed()) {
            const ModelParams p = make_params(solve_cmd, solve_flags);
            if (!check_ergodicity(p))
                throw std::invalid_argument(
                    "solve requires rho_slow < 1 (got rho_slow = " + fmt17(p.rho_slow) +
                    "); use the finite-buffer or abandon subcommands");
            const StationaryDistribution dist = solve_stationary(p);
            const PerformanceReport rep = performance_report(dist, p);
            if (format == "csv") return emit(report_csv(rep), output, out, err);
            return emit(wrap(params_json(p), report_json(rep)).dump(2) + "\n", output, out,
                        err);
        }

        if (marginal_cmd->parsed()) {
            const ModelParams p = make_params(marginal_cmd, marginal_flags);
            StationaryDistribution dist;
            if (marginal_cmd->count("--buffer") > 0)
                dist = solve_finite_buffer({p, marginal_buffer});
            else if (marginal_cmd->count("--delta") > 0)
                dist = solve_abandonment({p, marginal_delta, 1e-10});
            else {
                if (!check_ergodicity(p))
                    throw std::invalid_argument("marginal requires rho_slow < 1 "
                                                "unless --buffer or --delta is given");
                dist = solve_stationary(p);
            }
            int i_max = marginal_imax;
            if (i_max < 0) i_max = dist.geometric() ? default_i_max(dist) : dist.top_level();
            i_max = std::max(i_max, p.s);
            const MarginalDistribution m = marginal_total(dist, i_max);
            if (format == "csv") {
                std::ostringstream os;
                os << "i,probability\n";
                for (std::size_t i = 0; i < m.probabilities.size(); ++i)
                    os << i << ',' << fmt17(m.probabilities[i]) << '\n';
                return emit(os.str(), output, out, err);
            }
            Json res;
            res["i_max"] = i_max;
            res["tail_mass"] = m.tail_mass;
            res["modes"] = modes_json(m);
            res["probabilities"] = m.probabilities;
            return emit(wrap(params_json(p), std::move(res)).dump(2) + "\n", output, out,
                        err);
        }

        if (heatmap_cmd->parsed()) {
            const ModelParams p = make_params(heatmap_cmd, heatmap_flags);
            if (!check_ergodicity(p))
                throw std::invalid_argument("heatmap requires rho_slow < 1");
            const StationaryDistribution dist = solve_stationary(p);
            const int i_max = heatmap_imax >= 0 ? std::max(heatmap_imax, p.s)
                                                : default_i_max(dist);
            const Matrix h = joint_heatmap(dist, i_max);
            if (format == "csv") {
                std::ostringstream os;
                os << "i,j,probability\n";
                for (int i = 0; i <= i_max; ++i)
                    for (int j = 0; j <= std::min(i, p.s); ++j)
                        os << i << ',' << j << ',' << fmt17(h(i, j)) << '\n';
                return emit(os.str(), output, out, err);
            }
            Json entries = Json::array();
            for (int i = 0; i <= i_max; ++i)
                for (int j = 0; j <= std::min(i, p.s); ++j)
                    entries.push_back(Json::array({i, j, h(i, j)}));
            Json res;
            res["i_max"] = i_max;
            res["entries"] = std::move(entries);
            return emit(wrap(params_json(p), std::move(res)).dump(2) + "\n", output, out,
                        err);
        }

        if (dim_cmd->parsed()) {
            const DimensioningResult r =
                dimension_servers(dim_mu_fast, dim_mu_slow, dim_lambda, dim_target);
            Json params;
            params["lambda"] = dim_lambda;
            params["mu_fast"] = dim_mu_fast;
            params["mu_slow"] = dim_mu_slow;
            params["target_p_wait"] = dim_target;
            Json res;
            res["s_fast"] = r.s_fast;
            res["s_slowdown"] = r.s_slowdown;
            if (format == "csv") {
                std::ostringstream os;
                os << "s_fast,s_slowdown\n" << r.s_fast << ',' << r.s_slowdown << '\n';
                return emit(os.str(), output, out, err);
            }
            return emit(wrap(std::move(params), std::move(res)).dump(2) + "\n", output,
                        out, err);
        }

        if (fb_cmd->parsed()) {
            const ModelParams p = make_params(fb_cmd, fb_flags);
            const StationaryDistribution dist = solve_finite_buffer({p, fb_buffer});
            const PerformanceReport rep = performance_report(dist, p);
            const MarginalDistribution m = marginal_total(dist, dist.top_level());
            Json params = params_json(p);
            params["buffer"] = fb_buffer;
            Json res = report_json(rep);
            res["modes"] = modes_json(m);
            if (format == "csv") return emit(report_csv(rep), output, out, err);
            return emit(wrap(std::move(params), std::move(res)).dump(2) + "\n", output,
                        out, err);
        }

        if (ab_cmd->parsed()) {
            const ModelParams p = make_params(ab_cmd, ab_flags);
            const StationaryDistribution dist = solve_abandonment({p, ab_delta, ab_tail});
            const PerformanceReport rep = performance_report(dist, p);
            const MarginalDistribution m = marginal_total(dist, dist.top_level());
            Json params = params_json(p);
            params["delta"] = ab_delta;
            Json res = report_json(rep);
            res["modes"] = modes_json(m);
            if (format == "csv") return emit(report_csv(rep), output, out, err);
            return emit(wrap(std::move(params), std::move(res)).dump(2) + "\n", output,
                        out, err);
        }

        if (qed_cmd->parsed()) {
            const QedParams q{qed_beta, qed_gamma, qed_mu_slow};
            const auto rows = qed_convergence_table(q, qed_sizes);
            if (format == "csv") {
                std::ostringstream os;
                os << "s,p_wait_fast,p_wait_slowdown,p_wait_slow,lower,upper\n";
                for (const auto& r : rows)
                    os << r.s << ',' << fmt17(r.p_wait_fast) << ','
                       << fmt17(r.p_wait_slowdown) << ',' << fmt17(r.p_wait_slow) << ','
                       << fmt17(r.lower) << ',' << fmt17(r.upper) << '\n';
                return emit(os.str(), output, out, err);
            }
            Json params;
            params["beta"] = qed_beta;
            params["gamma"] = qed_gamma;
            params["mu_slow"] = qed_mu_slow;
            Json arr = Json::array();
            for (const auto& r : rows) {
                Json row;
                row["s"] = r.s;
                row["p_wait_fast"] = r.p_wait_fast;
                row["p_wait_slowdown"] = r.p_wait_slowdown;
                row["p_wait_slow"] = r.p_wait_slow;
                row["lower"] = r.lower;
                row["upper"] = r.upper;
                arr.push_back(std::move(row));
            }
            Json res;
            res["rows"] = std::move(arr);
            return emit(wrap(std::move(params), std::move(res)).dump(2) + "\n", output,
                        out, err);
        }

        if (sim_cmd->parsed()) {
            sim_cfg.params = make_params(sim_cmd, sim_flags);
            if (!sample_path_file.empty()) {
                const auto path = simulate_path(sim_cfg);
                std::ostringstream os;
                os << "time,total_customers,nondelayed_in_service\n";
                for (const auto& pt : path)
                    os << fmt17(pt.t) << ',' << pt.x << ',' << pt.y << '\n';
                std::ofstream file(sample_path_file, std::ios::binary);
                if (!file) {
                    err << "error: cannot open sample-path file '" << sample_path_file
                        << "'\n";
                    return 1;
                }
                file << os.str();
            }
            const SimEstimates est = simulate(sim_cfg);
            Json params = params_json(sim_cfg.params);
            params["horizon"] = sim_cfg.horizon;
            params["warmup"] = sim_cfg.warmup < 0 ? 0.1 * sim_cfg.horizon : sim_cfg.warmup;
            params["seed"] = sim_cfg.seed;
            params["replications"] = sim_cfg.replications;
            Json res;
            res["p_wait_hat"] = est.p_wait_hat;
            res["p_wait_halfwidth"] = est.p_wait_halfwidth;
            res["mean_l_hat"] = est.mean_l_hat;
            res["mean_l_halfwidth"] = est.mean_l_halfwidth;
            Json busy;
            busy["count"] = est.busy.count;
            busy["mean_length"] = est.busy.mean_length;
            busy["max_length"] = est.busy.max_length;
            res["busy_periods"] = std::move(busy);
            return emit(wrap(std::move(params), std::move(res)).dump(2) + "\n", output,
                        out, err);
        }

        if (couple_cmd->parsed()) {
            SimConfig cfg;
            cfg.params = make_params(couple_cmd, couple_flags);
            cfg.customers = couple_customers;
            CouplingReport total;
            for (int k = 0; k < couple_seeds; ++k) {
                cfg.seed = couple_seed + static_cast<std::uint64_t>(k);
                const CouplingReport r = simulate_coupled(cfg);
                total.customers_checked += r.customers_checked;
                total.violations_ws_ge_w += r.violations_ws_ge_w;
                total.violations_w_ge_wf += r.violations_w_ge_wf;
                total.violations_xs_ge_x += r.violations_xs_ge_x;
                total.violations_x_ge_xf += r.violations_x_ge_xf;
                total.max_violation_magnitude =
                    std::max(total.max_violation_magnitude, r.max_violation_magnitude);
            }
            Json params = params_json(cfg.params);
            params["customers"] = couple_customers;
            params["seed"] = couple_seed;
            params["seeds"] = couple_seeds;
            Json res;
            res["customers_checked"] = total.customers_checked;
            res["violations_ws_ge_w"] = total.violations_ws_ge_w;
            res["violations_w_ge_wf"] = total.violations_w_ge_wf;
            res["violations_xs_ge_x"] = total.violations_xs_ge_x;
            res["violations_x_ge_xf"] = total.violations_x_ge_xf;
            res["max_violation_magnitude"] = total.max_violation_magnitude;
            return emit(wrap(std::move(params), std::move(res)).dump(2) + "\n", output,
                        out, err);
        }

        if (validate_cmd->parsed()) {
            const auto checks = run_validation_suite(tier);
            bool all = true;
            for (const auto& c : checks) {
                all = all && c.passed;
                out << (c.passed ? "[PASS] " : "[FAIL] ") << c.name;
                if (!c.detail.empty()) out << " (" << c.detail << ")";
                out << "\n";
            }
            out << (all ? "all checks passed" : "SOME CHECKS FAILED") << " [" << tier
                << " tier, " << checks.size() << " checks]\n";
            return all ? 0 : 1;
        }
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";  // what() carries the stage
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace slowq
