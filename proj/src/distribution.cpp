#include "slowq/distribution.hpp"

#include <cassert>
#include <cstdlib>

namespace slowq {

int StationaryDistribution::top_level() const {
    if (geometric()) return -1;
    return params.s + static_cast<int>(std::get<ExplicitTail>(tail).levels.size());
}

double StationaryDistribution::p(int i, int j) const {
    const int s = params.s;
    assert(i >= 0 && j >= 0);
    if (i < s) {
        if (j > i) return 0.0;
        return boundary[i][j];
    }
    if (j > s) return 0.0;
    if (i == s) return p_s(j);
    if (geometric()) return level_vector(i)(j);
    const auto& lv = std::get<ExplicitTail>(tail).levels;
    const std::size_t k = static_cast<std::size_t>(i - s - 1);
    if (k >= lv.size()) return 0.0;
    return lv[k](j);
}

Vector StationaryDistribution::level_vector(int i) const {
    const int s = params.s;
    assert(i >= s);
    if (i == s) return p_s;
    if (geometric()) {
        const Matrix& R = std::get<GeometricTail>(tail).R;
        Vector v = p_s;
        for (int k = s; k < i; ++k) v = R.transpose() * v;
        return v;
    }
    const auto& lv = std::get<ExplicitTail>(tail).levels;
    const std::size_t k = static_cast<std::size_t>(i - s - 1);
    if (k >= lv.size()) return Vector::Zero(s + 1);
    return lv[k];
}

double StationaryDistribution::level_mass(int i) const {
    const int s = params.s;
    if (i < 0) return 0.0;
    if (i < s) {
        double acc = 0.0;
        for (double v : boundary[i]) acc += v;
        return acc;
    }
    return level_vector(i).sum();
}

double StationaryDistribution::p_wait() const {
    if (geometric())
        return p_s.dot(std::get<GeometricTail>(tail).inv_I_minus_R * Vector::Ones(params.s + 1));
    double acc = p_s.sum();
    for (const auto& v : std::get<ExplicitTail>(tail).levels) acc += v.sum();
    return acc;
}

double StationaryDistribution::mean_queue() const {
    if (geometric()) {
        const auto& gt = std::get<GeometricTail>(tail);
        const Vector ones = Vector::Ones(params.s + 1);
        // p_s R (I-R)^-2 1
        return (gt.R.transpose() * p_s).dot(gt.inv_I_minus_R * (gt.inv_I_minus_R * ones));
    }
    double acc = 0.0;
    const auto& lv = std::get<ExplicitTail>(tail).levels;
    for (std::size_t k = 0; k < lv.size(); ++k) acc += (k + 1.0) * lv[k].sum();
    return acc;
}

double StationaryDistribution::expected_busy_servers() const {
    double acc = 0.0;
    for (int i = 0; i < params.s; ++i) acc += i * level_mass(i);
    return acc + params.s * p_wait();
}

double StationaryDistribution::mean_system() const {
    return mean_queue() + expected_busy_servers();
}

double StationaryDistribution::tail_mass_above(int i_max) const {
    const int s = params.s;
    if (i_max < s) {
        double below = 0.0;
        for (int i = 0; i <= i_max; ++i) below += level_mass(i);
        return 1.0 - below;
    }
    if (geometric()) {
        const auto& gt = std::get<GeometricTail>(tail);
        Vector v = p_s;
        for (int k = s; k <= i_max; ++k) v = gt.R.transpose() * v;
        return v.dot(gt.inv_I_minus_R * Vector::Ones(s + 1));
    }
    const auto& lv = std::get<ExplicitTail>(tail).levels;
    double acc = 0.0;
    for (std::size_t k = static_cast<std::size_t>(i_max - s); k < lv.size(); ++k)
        acc += lv[k].sum();
    return acc;
}

}  // namespace slowq
