#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "ldrg/model.hpp"

namespace ldrg {

/// Sample-covariance Fisher information estimates built from the observed
/// subgraph statistics: within blocks are treated as replicates of the
/// within family (divisor K), block pairs as replicates of the between
/// family (divisor K(K-1)/2).
struct InfoEstimate {
    Eigen::MatrixXd within_avg;  ///< (1/K) sum_k (s_kk - mean)(s_kk - mean)^T
    Eigen::MatrixXd between_avg; ///< same over pairs with divisor C(K, 2)
    Eigen::MatrixXd within_full; ///< K * within_avg
    Eigen::MatrixXd between_full;///< C(K, 2) * between_avg
    int n_blocks = 0;
};

/// Requires K >= 2 (a single block offers no replication).
InfoEstimate fisher_hat(const LocalGraph& g, const ModelSpec& spec);

struct MatrixRoots {
    Eigen::MatrixXd sqrt;
    Eigen::MatrixXd inv_sqrt;
};

/// Symmetric square root and inverse square root via eigendecomposition.
/// Eigenvalues below -1e-8 reject the matrix as not PSD; eigenvalues in
/// [-1e-8, floor) are clamped to the floor before the roots are formed.
MatrixRoots matrix_inv_sqrt(const Eigen::MatrixXd& m, double floor = 1e-10);

struct CiEntry {
    double estimate = 0;
    double se = 0;
    double lower = 0;
    double upper = 0;
};

/// Wald intervals estimate_j +- z_{1-alpha/2} * sqrt([S^{-1}]_jj), with S
/// the covariance of the sufficient statistics at the estimate. A singular
/// S (eigenvalue <= 1e-10) is an error naming the dominant coordinate.
std::vector<CiEntry> wald_ci(const Eigen::VectorXd& estimate, const Eigen::MatrixXd& s,
                             double alpha);

/// (theoretical, empirical) quantile pairs: theoretical[i] is the standard
/// normal quantile at (i + 0.5) / n, empirical[i] the i-th order statistic.
std::vector<std::pair<double, double>> qq_points(std::vector<double> values);

/// Inverse standard normal CDF (Wichura's AS 241, double precision).
double normal_quantile(double p);

} // namespace ldrg
