#pragma once

#include <vector>

namespace slowq {

/// Erlang-B blocking probability for offered load a on s servers, via the
/// standard stable recursion.
double erlang_b(int s, double a);

/// Erlang-C delay probability; requires a < s.
double erlang_c(int s, double a);

struct MmsMetrics {
    double p_wait = 0.0;
    double mean_queue = 0.0;
    double mean_system = 0.0;
};

/// Exact M/M/s performance (the fast/slow comparison systems).
MmsMetrics mms_metrics(int s, double lambda, double mu);

/// P(L = i) for i = 0..i_max of a stable M/M/s queue.
std::vector<double> mms_distribution(int s, double lambda, double mu, int i_max);

}  // namespace slowq
