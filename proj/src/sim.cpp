#include "slowq/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "slowq/parallel.hpp"
#include "slowq/rng.hpp"

namespace slowq {

namespace {

constexpr int kBatches = 32;
constexpr std::uint64_t kStreamEvents = 1;
constexpr std::uint64_t kStreamArrivals = 2;
constexpr std::uint64_t kStreamServices = 3;

// Two-sided 97.5% Student-t quantiles; stepwise lookup is plenty for CI
// reporting.
double t_975(int dof) {
    static const std::pair<int, double> table[] = {
        {1, 12.706}, {2, 4.303}, {3, 3.182}, {4, 2.776},  {5, 2.571},
        {6, 2.447},  {7, 2.365}, {8, 2.306}, {9, 2.262},  {10, 2.228},
        {12, 2.179}, {15, 2.131}, {20, 2.086}, {25, 2.060}, {31, 2.040},
        {40, 2.021}, {60, 2.000}, {120, 1.980}};
    for (const auto& [d, q] : table)
        if (dof <= d) return q;
    return 1.960;
}

struct Replication {
    double p_wait = 0.0;
    double mean_l = 0.0;
    double pw_halfwidth = 0.0;
    double ml_halfwidth = 0.0;
    BusyPeriodStats busy;
};

struct BatchAccumulator {
    double start = 0.0;  // warmup end
    double batch_len = 0.0;
    std::vector<double> time_above;  // time with X >= s per batch
    std::vector<double> area;        // integral of X per batch

    void add(double from, double to, long long x, int s) {
        from = std::max(from, start);
        if (to <= from) return;
        while (from < to) {
            int k = static_cast<int>((from - start) / batch_len);
            k = std::clamp(k, 0, kBatches - 1);
            const double edge = start + (k + 1) * batch_len;
            const double seg = std::min(to, edge) - from;
            if (seg > 0.0) {
                area[static_cast<std::size_t>(k)] += seg * static_cast<double>(x);
                if (x >= s) time_above[static_cast<std::size_t>(k)] += seg;
            }
            from = std::min(to, edge);
            if (seg <= 0.0) break;  // numeric guard against stalls at batch edges
        }
    }
};

Replication run_replication(const SimConfig& cfg, std::uint64_t rep_seed) {
    const ModelParams& p = cfg.params;
    const double warmup = cfg.warmup < 0.0 ? 0.1 * cfg.horizon : cfg.warmup;
    SplitMix64 rng = named_stream(rep_seed, kStreamEvents);

    BatchAccumulator acc;
    acc.start = warmup;
    acc.batch_len = (cfg.horizon - warmup) / kBatches;
    acc.time_above.assign(kBatches, 0.0);
    acc.area.assign(kBatches, 0.0);

    long long x = cfg.initial_customers;
    int y = static_cast<int>(std::min<long long>(x, p.s));
    double t = 0.0;

    BusyPeriodStats busy;
    double busy_sum = 0.0;
    double busy_start = x >= p.s ? 0.0 : -1.0;
    auto close_busy = [&](double end) {
        if (busy_start < 0.0) return;
        const double a = std::max(busy_start, warmup);
        if (end > a) {
            const double len = end - a;
            ++busy.count;
            busy_sum += len;
            busy.max_length = std::max(busy.max_length, len);
        }
        busy_start = -1.0;
    };

    while (t < cfg.horizon) {
        const double rate_fast = y * p.mu_fast;
        const double rate_slow = (std::min<long long>(x, p.s) - y) * p.mu_slow;
        const double total = p.lambda + rate_fast + rate_slow;
        if (!(total > 0.0)) {
            acc.add(t, cfg.horizon, x, p.s);
            t = cfg.horizon;
            break;
        }
        const double dt = rng.exponential(total);
        const double t_next = std::min(t + dt, cfg.horizon);
        acc.add(t, t_next, x, p.s);
        t = t + dt;
        if (t >= cfg.horizon) break;

        const double u = rng.uniform01() * total;
        if (u <= p.lambda) {
            if (x < p.s) ++y;
            ++x;
            if (x == p.s && busy_start < 0.0) busy_start = t;
        } else if (u <= p.lambda + rate_fast) {
            --x;
            --y;
            if (x == p.s - 1) close_busy(t);
        } else {
            --x;
            if (x == p.s - 1) close_busy(t);
        }
    }
    close_busy(cfg.horizon);
    if (busy.count > 0) busy.mean_length = busy_sum / static_cast<double>(busy.count);

    Replication rep;
    rep.busy = busy;
    double pw_mean = 0.0, ml_mean = 0.0;
    for (int k = 0; k < kBatches; ++k) {
        pw_mean += acc.time_above[static_cast<std::size_t>(k)] / acc.batch_len;
        ml_mean += acc.area[static_cast<std::size_t>(k)] / acc.batch_len;
    }
    pw_mean /= kBatches;
    ml_mean /= kBatches;
    double pw_var = 0.0, ml_var = 0.0;
    for (int k = 0; k < kBatches; ++k) {
        const double dpw = acc.time_above[static_cast<std::size_t>(k)] / acc.batch_len - pw_mean;
        const double dml = acc.area[static_cast<std::size_t>(k)] / acc.batch_len - ml_mean;
        pw_var += dpw * dpw;
        ml_var += dml * dml;
    }
    pw_var /= (kBatches - 1);
    ml_var /= (kBatches - 1);
    const double tq = t_975(kBatches - 1);
    rep.p_wait = pw_mean;
    rep.mean_l = ml_mean;
    rep.pw_halfwidth = tq * std::sqrt(pw_var / kBatches);
    rep.ml_halfwidth = tq * std::sqrt(ml_var / kBatches);
    return rep;
}

}  // namespace

SimEstimates simulate(const SimConfig& cfg) {
    if (!(cfg.horizon > 0.0)) throw std::invalid_argument("simulate: horizon must be positive");
    const double warmup = cfg.warmup < 0.0 ? 0.1 * cfg.horizon : cfg.warmup;
    if (!(cfg.horizon > warmup))
        throw std::invalid_argument("simulate: horizon must exceed warmup");
    if (cfg.replications < 1)
        throw std::invalid_argument("simulate: replications must be >= 1");

    std::vector<Replication> reps(static_cast<std::size_t>(cfg.replications));
    parallel_for(cfg.replications, [&](int r) {
        reps[static_cast<std::size_t>(r)] =
            run_replication(cfg, cfg.seed + 0x51a2b3c4d5e6f708ULL * static_cast<std::uint64_t>(r));
    });

    SimEstimates est;
    if (cfg.replications == 1) {
        est.p_wait_hat = reps[0].p_wait;
        est.mean_l_hat = reps[0].mean_l;
        est.p_wait_halfwidth = reps[0].pw_halfwidth;
        est.mean_l_halfwidth = reps[0].ml_halfwidth;
        est.busy = reps[0].busy;
        return est;
    }

    const int n = cfg.replications;
    double pw = 0.0, ml = 0.0;
    for (const auto& r : reps) {
        pw += r.p_wait;
        ml += r.mean_l;
    }
    pw /= n;
    ml /= n;
    double pw_var = 0.0, ml_var = 0.0;
    double busy_sum = 0.0;
    for (const auto& r : reps) {
        pw_var += (r.p_wait - pw) * (r.p_wait - pw);
        ml_var += (r.mean_l - ml) * (r.mean_l - ml);
        est.busy.count += r.busy.count;
        busy_sum += r.busy.mean_length * static_cast<double>(r.busy.count);
        est.busy.max_length = std::max(est.busy.max_length, r.busy.max_length);
    }
    pw_var /= (n - 1);
    ml_var /= (n - 1);
    const double tq = t_975(n - 1);
    est.p_wait_hat = pw;
    est.mean_l_hat = ml;
    est.p_wait_halfwidth = tq * std::sqrt(pw_var / n);
    est.mean_l_halfwidth = tq * std::sqrt(ml_var / n);
    if (est.busy.count > 0) est.busy.mean_length = busy_sum / static_cast<double>(est.busy.count);
    return est;
}

std::vector<SamplePoint> simulate_path(const SimConfig& cfg) {
    if (!(cfg.horizon > 0.0)) throw std::invalid_argument("simulate_path: horizon must be positive");
    const ModelParams& p = cfg.params;
    SplitMix64 rng = named_stream(cfg.seed, kStreamEvents);

    std::vector<SamplePoint> path;
    long long x = cfg.initial_customers;
    int y = static_cast<int>(std::min<long long>(x, p.s));
    double t = 0.0;
    path.push_back({t, x, y});
    while (t < cfg.horizon) {
        const double rate_fast = y * p.mu_fast;
        const double rate_slow = (std::min<long long>(x, p.s) - y) * p.mu_slow;
        const double total = p.lambda + rate_fast + rate_slow;
        if (!(total > 0.0)) break;
        t += rng.exponential(total);
        if (t >= cfg.horizon) break;
        const double u = rng.uniform01() * total;
        if (u <= p.lambda) {
            if (x < p.s) ++y;
            ++x;
        } else if (u <= p.lambda + rate_fast) {
            --x;
            --y;
        } else {
            --x;
        }
        path.push_back({t, x, y});
    }
    return path;
}

namespace {

// Kiefer-Wolfowitz workload vector of an s-server FCFS queue: sorted
// ascending times until each server frees up.
class WorkloadVector {
public:
    explicit WorkloadVector(int s) : v_(static_cast<std::size_t>(s), 0.0) {}

    double wait() const { return v_.front(); }

    void admit(double service, double to_next_arrival) {
        double nv = v_.front() + service;
        std::size_t k = 0;
        while (k + 1 < v_.size() && v_[k + 1] < nv) {
            v_[k] = v_[k + 1];
            ++k;
        }
        v_[k] = nv;
        for (double& w : v_) w = std::max(0.0, w - to_next_arrival);
    }

private:
    std::vector<double> v_;
};

}  // namespace

CouplingReport simulate_coupled(const SimConfig& cfg) {
    const ModelParams& p = cfg.params;
    const long long n = cfg.customers > 0
                            ? cfg.customers
                            : std::llround(p.lambda * cfg.horizon);
    if (n < 1) throw std::invalid_argument("simulate_coupled: no customers to simulate");

    SplitMix64 arrivals = named_stream(cfg.seed, kStreamArrivals);
    SplitMix64 services = named_stream(cfg.seed, kStreamServices);

    WorkloadVector fast(p.s), mixed(p.s), slow(p.s);
    std::vector<double> dep_f, dep_m, dep_s;
    dep_f.reserve(static_cast<std::size_t>(n));
    dep_m.reserve(static_cast<std::size_t>(n));
    dep_s.reserve(static_cast<std::size_t>(n));

    CouplingReport report;
    report.customers_checked = n;

    double arrival_time = arrivals.exponential(p.lambda);
    for (long long i = 0; i < n; ++i) {
        const double e = services.exponential(1.0);  // shared unit requirement
        const double wf = fast.wait();
        const double wm = mixed.wait();
        const double ws = slow.wait();

        const double bf = e / p.mu_fast;
        const double bs = e / p.mu_slow;
        const double bm = wm > 0.0 ? bs : bf;  // delayed customers slow down

        if (ws < wm) {
            ++report.violations_ws_ge_w;
            report.max_violation_magnitude =
                std::max(report.max_violation_magnitude, wm - ws);
        }
        if (wm < wf) {
            ++report.violations_w_ge_wf;
            report.max_violation_magnitude =
                std::max(report.max_violation_magnitude, wf - wm);
        }

        dep_f.push_back(arrival_time + wf + bf);
        dep_m.push_back(arrival_time + wm + bm);
        dep_s.push_back(arrival_time + ws + bs);

        const double tau = arrivals.exponential(p.lambda);  // to the next arrival
        fast.admit(bf, tau);
        mixed.admit(bm, tau);
        slow.admit(bs, tau);
        arrival_time += tau;
    }

    std::sort(dep_f.begin(), dep_f.end());
    std::sort(dep_m.begin(), dep_m.end());
    std::sort(dep_s.begin(), dep_s.end());
    for (long long i = 0; i < n; ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        if (dep_s[k] < dep_m[k]) {
            ++report.violations_xs_ge_x;
            report.max_violation_magnitude =
                std::max(report.max_violation_magnitude, dep_m[k] - dep_s[k]);
        }
        if (dep_m[k] < dep_f[k]) {
            ++report.violations_x_ge_xf;
            report.max_violation_magnitude =
                std::max(report.max_violation_magnitude, dep_f[k] - dep_m[k]);
        }
    }
    return report;
}

}  // namespace slowq
