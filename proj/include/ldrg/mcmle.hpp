#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "ldrg/exact.hpp"
#include "ldrg/model.hpp"
#include "ldrg/sampler.hpp"

namespace ldrg {

/// Normalized importance weights w_i proportional to
/// exp(<theta - theta0, s_i>), max-shifted before exponentiation.
/// samples is n x d, one statistic vector per row.
Eigen::VectorXd importance_weights(const Eigen::MatrixXd& samples, const Eigen::VectorXd& theta,
                                   const Eigen::VectorXd& theta0);

/// Monte-Carlo log-likelihood-ratio objective
/// <theta - theta0, observed> - log mean_i exp(<theta - theta0, s_i>).
double log_ratio_objective(const Eigen::VectorXd& observed, const Eigen::MatrixXd& samples,
                           const Eigen::VectorXd& theta, const Eigen::VectorXd& theta0);

/// Importance-sampled gradient observed - sum_i w_i s_i.
Eigen::VectorXd is_gradient(const Eigen::VectorXd& observed, const Eigen::MatrixXd& samples,
                            const Eigen::VectorXd& theta, const Eigen::VectorXd& theta0);

/// Importance-weighted covariance of the sampled statistics (the Fisher
/// information estimate at theta). One sample row yields the zero matrix.
Eigen::MatrixXd is_information(const Eigen::MatrixXd& samples, const Eigen::VectorXd& theta,
                               const Eigen::VectorXd& theta0);

/// 1 / sum_i w_i^2 for normalized weights; equals n for uniform weights.
double effective_sample_size(const Eigen::VectorXd& weights);

/// Batch-means Monte-Carlo standard error of each column mean of a
/// correlated sample sequence; floor(sqrt(n)) batches.
Eigen::VectorXd batch_means_mcse(const Eigen::MatrixXd& samples);

struct FitConfig {
    std::int64_t n_mcmc = 20000;
    int max_outer = 50;
    int max_inner = 25;
    /// Convergence arm 1: |g_j| <= grad_tol * max(1, sd_j).
    double grad_tol = 1e-3;
    /// Convergence arm 2: |g_j| <= grad_t_max * mcse_j (the gradient is
    /// indistinguishable from zero at one MC standard error).
    double grad_t_max = 1.0;
    /// Refresh the sample when ESS falls below ess_fraction * n_mcmc.
    double ess_fraction = 0.1;
    double burnin_multiplier = 10.0;
    double interval_multiplier = 1.0;
    double theta_cap = 30.0;
    double ridge = 1e-10;
    std::uint64_t seed = 0;
};

struct FitResult {
    ParamVector theta;
    /// MC covariance of the summed within (resp. between) statistics at the
    /// final parameter value; the plug-in Fisher information estimate.
    Eigen::MatrixXd info_within;
    Eigen::MatrixXd info_between;
    FitStatus status = FitStatus::Converged;
    int outer_within = 0;
    int outer_between = 0;
    std::vector<double> ess_within;
    std::vector<double> ess_between;
    std::int64_t n_mcmc = 0;
    std::uint64_t seed = 0;
};

/// Monte-Carlo maximum likelihood for both parameter groups. The within and
/// between families are estimated separately; RNG streams are derived from
/// (seed, outer iteration, global subgraph index), so the within estimate is
/// bit-identical whether or not between terms are present.
FitResult fit_model(const LocalGraph& g, const ModelSpec& spec, const FitConfig& config = {});

/// Starting value: logit of the relevant edge density per edge-count term
/// (halved for node-group terms, whose within-group edges carry the
/// coefficient twice), zero for transitive terms.
ParamVector initial_theta(const LocalGraph& g, const ModelSpec& spec);

} // namespace ldrg
