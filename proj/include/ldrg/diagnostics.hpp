#pragma once

#include <Eigen/Core>
#include <map>

#include "ldrg/block_partition.hpp"

namespace ldrg {

/// Size and spectral quantities entering the error-bound expressions.
/// Spectra are per-subgraph averages: the full within (between) information
/// divided by K (by K(K-1)/2). Singular inputs report minima of 0 and set
/// the warning flag instead of failing.
struct TheoryQuantities {
    int n = 0;
    int k = 0;
    double a_avg = 0;
    int a_max = 0;
    int p = 0;
    int q = 0;
    double lambda_max_within = 0;
    double lambda_min_within = 0;
    double lambda_max_between = 0;
    double lambda_min_between = 0;
    bool singular_warning = false;
    /// Spectra are evaluated at the supplied parameter, not over an
    /// epsilon-ball; always false, kept explicit in serialized output.
    bool eps_ball = false;
};

TheoryQuantities theory_quantities(const BlockPartition& part,
                                   const Eigen::MatrixXd& info_within_full,
                                   const Eigen::MatrixXd& info_between_full);

/// Evaluated error-bound expressions at constant c:
///   within:  c * sqrt(A_avg) * sqrt(l_max_w) / l_min_w * sqrt(p / N)
///   between: c * A_avg * sqrt(l_max_b) / l_min_b * sqrt(q / N^2)
/// plus the block-size ceiling
///   A_max <= min((N l_max_w / (A_avg p^2))^{1/4},
///                (N^2 l_max_b / (4 A_avg^2 q^2))^{1/4}).
/// Sides with zero parameter dimension are skipped (reported as NaN and
/// excluded from the ceiling); a zero spectral minimum on a needed side is
/// an error.
struct BoundRecord {
    double within_bound = 0;
    double between_bound = 0;
    double a_max_ceiling = 0;
    bool a_max_ok = false;
};

BoundRecord bound_expressions(const TheoryQuantities& tq, double c);

/// Predicted-error recipe from observed 95% error quantiles:
/// C_N = Q_N / sqrt(p_N / N), C = mean over N, E_N = C * sqrt(p_N / N).
struct PredictedError {
    std::map<int, double> c_by_n;
    double c_mean = 0;
    std::map<int, double> e_by_n;
};

PredictedError predicted_error(const std::map<int, double>& q95_by_n,
                               const std::map<int, int>& p_by_n);

} // namespace ldrg
