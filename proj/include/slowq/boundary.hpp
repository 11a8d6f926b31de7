#pragma once

#include <cstdint>
#include <vector>

#include "slowq/distribution.hpp"
#include "slowq/model.hpp"

namespace slowq {

/// First-passage probabilities theta_k(i,j): starting from boundary state
/// (i,j), the first visit to phase j+1 happens in state (i+1-k, j+1).
/// Defined for 0 <= i <= s-1, 0 <= j <= i, 0 <= k <= i-j; for fixed (i,j)
/// the values over k sum to one.
class ThetaTable {
public:
    explicit ThetaTable(int s);

    int servers() const { return s_; }

    double operator()(int k, int i, int j) const {
        const double* p = slice(i, j);
        return p[k];
    }

    /// Contiguous values theta_k(i,j), k = 0..i-j.
    const double* slice(int i, int j) const;
    double* slice(int i, int j);
    int slice_len(int i, int j) const { return i - j + 1; }

private:
    int s_;
    std::vector<double> values_;
    std::vector<std::size_t> offset_;
};

ThetaTable theta_table(const ModelParams& params);

/// First-passage probabilities psi_{(k,l)}(i,j) to level k in phase l,
/// reduced to what the boundary recursion consumes: for every target level
/// k the matrix of entries psi_{(k,l)}(k-1, j) ("one level up" passage
/// probabilities). level_up(k) has rows j = 0..k-1 and columns l = 0..k;
/// each row sums to one.
class PsiTable {
public:
    PsiTable(int s, std::vector<Matrix> level_up, std::uint64_t evaluations)
        : s_(s), level_up_(std::move(level_up)), evaluations_(evaluations) {}

    int servers() const { return s_; }
    const Matrix& level_up(int k) const { return level_up_[k]; }

    /// The (s+1)x(s+1) matrix Psi of entries psi_{(s,l)}(s-1, j) used by the
    /// level-s embedding. Row s is never referenced (the down-rate out of
    /// phase s at level s is carried entirely by the subdiagonal) and is
    /// left zero.
    Matrix full_psi_matrix() const;

    /// Number of recursion evaluations performed while building the table;
    /// equals s(s+1)(s+2)(s+3)/24.
    std::uint64_t evaluations() const { return evaluations_; }

private:
    int s_;
    std::vector<Matrix> level_up_;  // index k = 1..s
    std::uint64_t evaluations_;
};

PsiTable psi_table(const ModelParams& params, const ThetaTable& theta);

/// Full triangle of psi values for one target (k,l), for diagnostics and
/// oracle comparisons. at(i,j) is valid for k-l <= i <= k-1, j <= i-(k-l).
struct PsiTriangle {
    int k = 0, l = 0;
    std::vector<std::vector<double>> rows;  // rows[i - (k-l)][j]

    double at(int i, int j) const { return rows[i - (k - l)][j]; }
    bool contains(int i, int j) const {
        return i >= k - l && i <= k - 1 && j >= 0 && j <= i - (k - l);
    }
};

PsiTriangle psi_target_triangle(const ModelParams& params, const ThetaTable& theta,
                                int k, int l);

/// Unnormalized level-s probabilities from the embedded balance equations
/// p_s (Lm1 Psi + L0 + L1 G) = 0, solved by GTH elimination.
Vector solve_level_s(const GeneratorBlocks& blocks, const Matrix& G, const Matrix& Psi);

/// Boundary probabilities below level s, solved one level at a time from
/// s-1 down to 0 using the embedded balance equations. Input p_s may carry
/// any positive scale; the output shares it.
std::vector<std::vector<double>> backward_boundary(const ModelParams& params,
                                                   const ThetaTable& theta,
                                                   const PsiTable& psi,
                                                   const Vector& p_s);

/// Divides by the total mass sum_V p(i,j) + p_s (I-R)^-1 1.
StationaryDistribution normalize(const ModelParams& params,
                                 std::vector<std::vector<double>> boundary, Vector p_s,
                                 const Matrix& R, const Matrix& inv_I_minus_R);

/// Variant-model normalization over a finite set of levels s..s+tail.
StationaryDistribution normalize_finite(const ModelParams& params,
                                        std::vector<std::vector<double>> boundary,
                                        Vector p_s, std::vector<Vector> tail_levels);

}  // namespace slowq
