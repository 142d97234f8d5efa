#include "ldrg/mcmle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ldrg {

Eigen::VectorXd importance_weights(const Eigen::MatrixXd& samples, const Eigen::VectorXd& theta,
                                   const Eigen::VectorXd& theta0) {
    if (samples.rows() == 0) throw DataError("importance_weights: empty sample");
    Eigen::VectorXd a = samples * (theta - theta0);
    double m = a.maxCoeff();
    Eigen::VectorXd w = (a.array() - m).exp();
    return w / w.sum();
}

double log_ratio_objective(const Eigen::VectorXd& observed, const Eigen::MatrixXd& samples,
                           const Eigen::VectorXd& theta, const Eigen::VectorXd& theta0) {
    if (samples.rows() == 0) throw DataError("log_ratio_objective: empty sample");
    Eigen::VectorXd a = samples * (theta - theta0);
    double m = a.maxCoeff();
    double lse = m + std::log((a.array() - m).exp().sum()) -
                 std::log(static_cast<double>(samples.rows()));
    return (theta - theta0).dot(observed) - lse;
}

Eigen::VectorXd is_gradient(const Eigen::VectorXd& observed, const Eigen::MatrixXd& samples,
                            const Eigen::VectorXd& theta, const Eigen::VectorXd& theta0) {
    Eigen::VectorXd w = importance_weights(samples, theta, theta0);
    return observed - samples.transpose() * w;
}

Eigen::MatrixXd is_information(const Eigen::MatrixXd& samples, const Eigen::VectorXd& theta,
                               const Eigen::VectorXd& theta0) {
    Eigen::VectorXd w = importance_weights(samples, theta, theta0);
    Eigen::VectorXd mu = samples.transpose() * w;
    Eigen::MatrixXd centered = samples.rowwise() - mu.transpose();
    return centered.transpose() * w.asDiagonal() * centered;
}

double effective_sample_size(const Eigen::VectorXd& weights) {
    double s2 = weights.squaredNorm();
    if (s2 <= 0) throw NumericError("effective_sample_size: weights are all zero");
    return 1.0 / s2;
}

Eigen::VectorXd batch_means_mcse(const Eigen::MatrixXd& samples) {
    Eigen::Index n = samples.rows();
    Eigen::Index d = samples.cols();
    Eigen::VectorXd out = Eigen::VectorXd::Constant(d, std::numeric_limits<double>::infinity());
    auto nb = static_cast<Eigen::Index>(std::floor(std::sqrt(static_cast<double>(n))));
    if (nb < 2) return out;
    Eigen::Index m = n / nb;
    Eigen::MatrixXd means(nb, d);
    for (Eigen::Index b = 0; b < nb; ++b) {
        means.row(b) = samples.middleRows(b * m, m).colwise().mean();
    }
    Eigen::RowVectorXd grand = means.colwise().mean();
    for (Eigen::Index c = 0; c < d; ++c) {
        double var = (means.col(c).array() - grand[c]).square().sum() / static_cast<double>(nb - 1);
        out[c] = std::sqrt(var / static_cast<double>(nb));
    }
    return out;
}

ParamVector initial_theta(const LocalGraph& g, const ModelSpec& spec) {
    const auto& part = spec.partition();
    auto logit = [](double num, double den) {
        if (den <= 0) return 0.0;
        double eps = 0.5 / den;
        double d = std::clamp(num / den, eps, 1.0 - eps);
        return std::log(d / (1.0 - d));
    };
    ParamVector theta = ParamVector::zeros(spec.p(), spec.q());
    StatVector lo, hi;
    statistic_range(spec, lo, hi);
    StatVector obs = compute_statistics(g, spec);
    int slot = 0;
    for (const auto& term : spec.within_terms()) {
        double num = static_cast<double>(obs[static_cast<std::size_t>(slot)]);
        double den = static_cast<double>(hi[static_cast<std::size_t>(slot)]);
        switch (term.kind) {
            case TermKind::WithinEdgesTotal:
            case TermKind::WithinEdgesPerBlock:
                theta.within[slot] = logit(num, den);
                break;
            case TermKind::WithinEdgesByNodeGroup:
                theta.within[slot] = 0.5 * logit(num, den);
                break;
            default:
                theta.within[slot] = 0.0;
                break;
        }
        ++slot;
    }
    for (int c = 0; c < spec.q(); ++c, ++slot) {
        const auto& term = spec.between_terms()[static_cast<std::size_t>(c)];
        double num = static_cast<double>(obs[static_cast<std::size_t>(slot)]);
        double den = static_cast<double>(hi[static_cast<std::size_t>(slot)]);
        if (term.kind == TermKind::BetweenEdgesTotal || term.kind == TermKind::BetweenEdgesPerPair) {
            theta.between[c] = logit(num, den);
        }
    }
    (void)part;
    return theta;
}

namespace {

struct GroupProblem {
    bool within = true;
    int dim = 0;
    Eigen::VectorXd observed;
    Eigen::VectorXd range_lo, range_hi;
    std::vector<SubgraphRef> refs; // subgraphs contributing to this group
};

struct GroupOutcome {
    Eigen::VectorXd theta;
    Eigen::MatrixXd information;
    FitStatus status = FitStatus::Converged;
    int outer = 0;
    std::vector<double> ess_trace;
};

// Draws n rows of the group's summed statistic: one chain per subgraph,
// each on a scratch copy of the observed graph, streams fixed by
// (seed, outer, global subgraph index).
Eigen::MatrixXd draw_group_sample(const LocalGraph& observed_graph, const ModelSpec& spec,
                                  const GroupProblem& gp, const ParamVector& theta,
                                  const FitConfig& cfg, int outer) {
    Eigen::MatrixXd samples = Eigen::MatrixXd::Zero(cfg.n_mcmc, gp.dim);
    SamplerOptions opts{cfg.burnin_multiplier, cfg.interval_multiplier};
    LocalGraph scratch = observed_graph;
    const auto& part = spec.partition();
    for (SubgraphRef ref : gp.refs) {
        std::uint64_t stream = derive_stream(
            {cfg.seed, static_cast<std::uint64_t>(outer),
             static_cast<std::uint64_t>(part.subgraph_index(ref))});
        std::int64_t row = 0;
        run_subgraph_chain(scratch, spec, theta, ref, cfg.n_mcmc, opts, stream,
                           [&](const LocalGraph&, const std::int64_t* slice) {
                               for (int c = 0; c < gp.dim; ++c) {
                                   samples(row, c) += static_cast<double>(slice[c]);
                               }
                               ++row;
                           });
    }
    return samples;
}

GroupOutcome fit_group(const LocalGraph& observed_graph, const ModelSpec& spec,
                       const GroupProblem& gp, const Eigen::VectorXd& theta_init,
                       const FitConfig& cfg) {
    GroupOutcome out;
    out.theta = theta_init;
    out.information = Eigen::MatrixXd::Zero(gp.dim, gp.dim);
    if (gp.dim == 0) return out;

    for (int c = 0; c < gp.dim; ++c) {
        if (gp.observed[c] <= gp.range_lo[c] || gp.observed[c] >= gp.range_hi[c]) {
            out.status = FitStatus::SuspectedNonexistence;
            return out;
        }
    }

    out.status = FitStatus::MaxIterations;
    ParamVector theta_full = ParamVector::zeros(spec.p(), spec.q());
    for (int outer = 0; outer < cfg.max_outer; ++outer) {
        out.outer = outer + 1;
        if (gp.within) {
            theta_full.within = out.theta;
        } else {
            theta_full.between = out.theta;
        }
        Eigen::MatrixXd samples = draw_group_sample(observed_graph, spec, gp, theta_full, cfg, outer);
        Eigen::VectorXd mean = samples.colwise().mean().transpose();
        Eigen::VectorXd sd = ((samples.rowwise() - mean.transpose()).colwise().squaredNorm() /
                              static_cast<double>(samples.rows() - 1))
                                 .cwiseSqrt()
                                 .transpose();
        Eigen::VectorXd mcse = batch_means_mcse(samples);
        Eigen::VectorXd tol(gp.dim);
        for (int c = 0; c < gp.dim; ++c) {
            tol[c] = std::max(cfg.grad_tol * std::max(1.0, sd[c]), cfg.grad_t_max * mcse[c]);
        }

        Eigen::VectorXd grad0 = gp.observed - mean;
        if ((grad0.cwiseAbs().array() <= tol.array()).all()) {
            out.status = FitStatus::Converged;
            out.information = is_information(samples, out.theta, out.theta);
            return out;
        }

        // Inner ascent of the log-likelihood ratio against this sample.
        Eigen::VectorXd theta0 = out.theta;
        double ess_floor = cfg.ess_fraction * static_cast<double>(samples.rows());
        for (int inner = 0; inner < cfg.max_inner; ++inner) {
            Eigen::VectorXd w = importance_weights(samples, out.theta, theta0);
            double ess = effective_sample_size(w);
            out.ess_trace.push_back(ess);
            if (inner > 0 && ess < ess_floor) break;
            Eigen::VectorXd grad = gp.observed - samples.transpose() * w;
            if ((grad.cwiseAbs().array() <= tol.array()).all()) break;
            Eigen::MatrixXd info = is_information(samples, out.theta, theta0);
            info.diagonal().array() += cfg.ridge * std::max(1.0, info.trace() / gp.dim);
            Eigen::VectorXd step = info.ldlt().solve(grad);
            double f = log_ratio_objective(gp.observed, samples, out.theta, theta0);
            double scale = 1.0;
            Eigen::VectorXd cand = out.theta + step;
            int halvings = 0;
            while (log_ratio_objective(gp.observed, samples, cand, theta0) < f && halvings < 30) {
                scale *= 0.5;
                cand = out.theta + scale * step;
                ++halvings;
            }
            out.theta = cand;
            if (out.theta.lpNorm<Eigen::Infinity>() > cfg.theta_cap) {
                out.status = FitStatus::SuspectedNonexistence;
                out.information = is_information(samples, out.theta, theta0);
                return out;
            }
        }
        out.information = is_information(samples, out.theta, theta0);
    }
    return out;
}

} // namespace

FitResult fit_model(const LocalGraph& g, const ModelSpec& spec, const FitConfig& config) {
    if (config.n_mcmc < 10) throw DataError("fit: n_mcmc must be at least 10");
    if (config.max_outer < 1) throw DataError("fit: max_outer must be positive");

    const auto& part = spec.partition();
    StatVector obs = compute_statistics(g, spec);
    StatVector lo, hi;
    statistic_range(spec, lo, hi);

    GroupProblem within;
    within.within = true;
    within.dim = spec.p();
    within.observed.resize(spec.p());
    within.range_lo.resize(spec.p());
    within.range_hi.resize(spec.p());
    for (int c = 0; c < spec.p(); ++c) {
        within.observed[c] = static_cast<double>(obs[static_cast<std::size_t>(c)]);
        within.range_lo[c] = static_cast<double>(lo[static_cast<std::size_t>(c)]);
        within.range_hi[c] = static_cast<double>(hi[static_cast<std::size_t>(c)]);
    }
    for (int k = 0; k < part.n_blocks(); ++k) within.refs.push_back({k, k});

    GroupProblem between;
    between.within = false;
    between.dim = spec.q();
    between.observed.resize(spec.q());
    between.range_lo.resize(spec.q());
    between.range_hi.resize(spec.q());
    for (int c = 0; c < spec.q(); ++c) {
        between.observed[c] = static_cast<double>(obs[static_cast<std::size_t>(spec.p() + c)]);
        between.range_lo[c] = static_cast<double>(lo[static_cast<std::size_t>(spec.p() + c)]);
        between.range_hi[c] = static_cast<double>(hi[static_cast<std::size_t>(spec.p() + c)]);
    }
    for (int k = 0; k < part.n_blocks(); ++k) {
        for (int l = k + 1; l < part.n_blocks(); ++l) between.refs.push_back({k, l});
    }

    ParamVector init = initial_theta(g, spec);
    GroupOutcome ow = fit_group(g, spec, within, init.within, config);
    GroupOutcome ob = fit_group(g, spec, between, init.between, config);

    FitResult out;
    out.theta = {ow.theta, ob.theta};
    out.info_within = ow.information;
    out.info_between = ob.information;
    out.outer_within = ow.outer;
    out.outer_between = ob.outer;
    out.ess_within = std::move(ow.ess_trace);
    out.ess_between = std::move(ob.ess_trace);
    out.n_mcmc = config.n_mcmc;
    out.seed = config.seed;
    if (ow.status == FitStatus::SuspectedNonexistence ||
        ob.status == FitStatus::SuspectedNonexistence) {
        out.status = FitStatus::SuspectedNonexistence;
    } else if (ow.status == FitStatus::MaxIterations || ob.status == FitStatus::MaxIterations) {
        out.status = FitStatus::MaxIterations;
    } else {
        out.status = FitStatus::Converged;
    }
    return out;
}

} // namespace ldrg
