#include "ldrg/exact.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

namespace ldrg {

const char* to_string(FitStatus s) {
    switch (s) {
        case FitStatus::Converged: return "Converged";
        case FitStatus::MaxIterations: return "MaxIterations";
        case FitStatus::SuspectedNonexistence: return "SuspectedNonexistence";
    }
    return "unknown";
}

ExactTable build_exact_table(const ModelSpec& spec, SubgraphRef ref, int var_cap) {
    LocalGraph scratch(spec.partition_ptr());
    std::int64_t d64 = scratch.n_vars(ref);
    if (d64 > var_cap) {
        throw DataError("exact: subgraph (" + std::to_string(ref.k + 1) + ", " +
                        std::to_string(ref.l + 1) + ") has " + std::to_string(d64) +
                        " edge variables; enumeration cap is " + std::to_string(var_cap));
    }
    int d = static_cast<int>(d64);
    ExactTable t;
    t.ref = ref;
    t.d = d;
    t.within = ref.within();
    t.stat_dim = ref.within() ? spec.p() : spec.q();
    t.stats.assign((std::size_t{1} << d) * static_cast<std::size_t>(t.stat_dim), 0);
    t.stat_min.assign(static_cast<std::size_t>(t.stat_dim), 0);
    t.stat_max.assign(static_cast<std::size_t>(t.stat_dim), 0);
    if (t.stat_dim == 0) return t;

    // Gray-code walk: step n flips variable countr_zero(n), visiting every
    // state once; statistics are carried along via change slices.
    std::vector<std::int64_t> current(static_cast<std::size_t>(t.stat_dim), 0);
    std::vector<std::int64_t> delta(static_cast<std::size_t>(t.stat_dim), 0);
    auto store = [&](std::uint64_t state) {
        std::int64_t* row = t.stats.data() + state * static_cast<std::size_t>(t.stat_dim);
        std::copy(current.begin(), current.end(), row);
        for (int c = 0; c < t.stat_dim; ++c) {
            t.stat_min[static_cast<std::size_t>(c)] =
                std::min(t.stat_min[static_cast<std::size_t>(c)], current[static_cast<std::size_t>(c)]);
            t.stat_max[static_cast<std::size_t>(c)] =
                std::max(t.stat_max[static_cast<std::size_t>(c)], current[static_cast<std::size_t>(c)]);
        }
    };
    store(0);
    std::uint64_t n_states = std::uint64_t{1} << d;
    for (std::uint64_t n = 1; n < n_states; ++n) {
        int var = std::countr_zero(n);
        auto [i, j] = scratch.var_nodes(ref, var);
        if (ref.within()) {
            within_change_slice(scratch, spec, i, j, delta.data());
        } else {
            between_change_slice(scratch, spec, i, j, delta.data());
        }
        scratch.toggle_edge(i, j);
        for (int c = 0; c < t.stat_dim; ++c) {
            current[static_cast<std::size_t>(c)] += delta[static_cast<std::size_t>(c)];
        }
        store(n ^ (n >> 1));
    }
    return t;
}

namespace {

// Linear predictor of every state; returns the maximum for shifting.
double fill_predictor(const ExactTable& t, const Eigen::VectorXd& theta,
                      std::vector<double>& a) {
    std::int64_t n = t.n_states();
    a.resize(static_cast<std::size_t>(n));
    double m = -std::numeric_limits<double>::infinity();
    const std::int64_t* row = t.stats.data();
    for (std::int64_t s = 0; s < n; ++s, row += t.stat_dim) {
        double acc = 0;
        for (int c = 0; c < t.stat_dim; ++c) acc += theta[c] * static_cast<double>(row[c]);
        a[static_cast<std::size_t>(s)] = acc;
        m = std::max(m, acc);
    }
    return m;
}

} // namespace

double table_log_normalizer(const ExactTable& t, const Eigen::VectorXd& theta_slice) {
    if (t.stat_dim == 0) return t.d * std::log(2.0);
    std::vector<double> a;
    double m = fill_predictor(t, theta_slice, a);
    double z = 0;
    for (double v : a) z += std::exp(v - m);
    return m + std::log(z);
}

std::vector<double> table_distribution(const ExactTable& t, const Eigen::VectorXd& theta_slice) {
    std::vector<double> a;
    if (t.stat_dim == 0) {
        a.assign(static_cast<std::size_t>(t.n_states()), 1.0 / static_cast<double>(t.n_states()));
        return a;
    }
    double m = fill_predictor(t, theta_slice, a);
    double z = 0;
    for (double v : a) z += std::exp(v - m);
    for (double& v : a) v = std::exp(v - m) / z;
    return a;
}

Eigen::VectorXd table_mean(const ExactTable& t, const Eigen::VectorXd& theta_slice) {
    std::vector<double> w = table_distribution(t, theta_slice);
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(t.stat_dim);
    const std::int64_t* row = t.stats.data();
    for (std::size_t s = 0; s < w.size(); ++s, row += t.stat_dim) {
        for (int c = 0; c < t.stat_dim; ++c) mu[c] += w[s] * static_cast<double>(row[c]);
    }
    return mu;
}

Eigen::MatrixXd table_information(const ExactTable& t, const Eigen::VectorXd& theta_slice) {
    std::vector<double> w = table_distribution(t, theta_slice);
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(t.stat_dim);
    const std::int64_t* row = t.stats.data();
    for (std::size_t s = 0; s < w.size(); ++s, row += t.stat_dim) {
        for (int c = 0; c < t.stat_dim; ++c) mu[c] += w[s] * static_cast<double>(row[c]);
    }
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(t.stat_dim, t.stat_dim);
    Eigen::VectorXd dev(t.stat_dim);
    row = t.stats.data();
    for (std::size_t s = 0; s < w.size(); ++s, row += t.stat_dim) {
        for (int c = 0; c < t.stat_dim; ++c) dev[c] = static_cast<double>(row[c]) - mu[c];
        info.selfadjointView<Eigen::Lower>().rankUpdate(dev, w[s]);
    }
    return info.selfadjointView<Eigen::Lower>();
}

ExactModel::ExactModel(std::shared_ptr<const BlockPartition> partition, ModelSpec spec,
                       int var_cap)
    : part_(std::move(partition)), spec_(std::move(spec)) {
    int n_sub = part_->n_subgraphs();
    tables_.reserve(static_cast<std::size_t>(n_sub));
    for (int s = 0; s < n_sub; ++s) {
        tables_.push_back(build_exact_table(spec_, part_->subgraph_at(s), var_cap));
    }
}

const ExactTable& ExactModel::table(SubgraphRef ref) const {
    return tables_[static_cast<std::size_t>(part_->subgraph_index(ref))];
}

Eigen::VectorXd ExactModel::slice_of(const ParamVector& theta, const ExactTable& t) const {
    return t.within ? theta.within : theta.between;
}

double ExactModel::log_normalizer(const ParamVector& theta) const {
    check_finite(theta, "exact_log_normalizer");
    double psi = 0;
    for (const auto& t : tables_) psi += table_log_normalizer(t, slice_of(theta, t));
    return psi;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> ExactModel::mean_value(const ParamVector& theta) const {
    check_finite(theta, "exact_mean_value");
    Eigen::VectorXd mu_w = Eigen::VectorXd::Zero(spec_.p());
    Eigen::VectorXd mu_b = Eigen::VectorXd::Zero(spec_.q());
    for (const auto& t : tables_) {
        if (t.stat_dim == 0) continue;
        if (t.within) {
            mu_w += table_mean(t, theta.within);
        } else {
            mu_b += table_mean(t, theta.between);
        }
    }
    return {mu_w, mu_b};
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> ExactModel::fisher_information(
    const ParamVector& theta) const {
    check_finite(theta, "exact_fisher_information");
    Eigen::MatrixXd iw = Eigen::MatrixXd::Zero(spec_.p(), spec_.p());
    Eigen::MatrixXd ib = Eigen::MatrixXd::Zero(spec_.q(), spec_.q());
    for (const auto& t : tables_) {
        if (t.stat_dim == 0) continue;
        if (t.within) {
            iw += table_information(t, theta.within);
        } else {
            ib += table_information(t, theta.between);
        }
    }
    return {iw, ib};
}

double ExactModel::log_likelihood(const ParamVector& theta, const StatVector& observed) const {
    check_finite(theta, "exact_log_likelihood");
    if (static_cast<int>(observed.size()) != spec_.dim()) {
        throw DataError("exact_log_likelihood: statistic vector has wrong length");
    }
    double lin = 0;
    for (int c = 0; c < spec_.p(); ++c) {
        lin += theta.within[c] * static_cast<double>(observed[static_cast<std::size_t>(c)]);
    }
    for (int c = 0; c < spec_.q(); ++c) {
        lin += theta.between[c] * static_cast<double>(observed[static_cast<std::size_t>(spec_.p() + c)]);
    }
    return lin - log_normalizer(theta);
}

double ExactModel::log_likelihood(const ParamVector& theta, const LocalGraph& g) const {
    return log_likelihood(theta, compute_statistics(g, spec_));
}

std::vector<double> ExactModel::state_distribution(SubgraphRef ref, const ParamVector& theta) const {
    check_finite(theta, "state_distribution");
    const ExactTable& t = table(ref);
    return table_distribution(t, slice_of(theta, t));
}

namespace {

struct GroupSolve {
    Eigen::VectorXd theta;
    FitStatus status = FitStatus::Converged;
    int iterations = 0;
    double grad_norm = 0.0;
};

// Newton with step halving on the exact group log-likelihood
// f(theta) = <theta, obs> - sum_t psi_t(theta).
GroupSolve solve_group(const std::vector<const ExactTable*>& tables, const Eigen::VectorXd& obs,
                       const ExactMleConfig& cfg) {
    GroupSolve out;
    int dim = static_cast<int>(obs.size());
    out.theta = Eigen::VectorXd::Zero(dim);
    if (dim == 0) return out;

    // Boundary screen: a coordinate at its enumerated extreme puts the
    // observation on the convex support boundary and the MLE at infinity.
    Eigen::VectorXd lo = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd hi = Eigen::VectorXd::Zero(dim);
    for (const ExactTable* t : tables) {
        for (int c = 0; c < dim; ++c) {
            lo[c] += static_cast<double>(t->stat_min[static_cast<std::size_t>(c)]);
            hi[c] += static_cast<double>(t->stat_max[static_cast<std::size_t>(c)]);
        }
    }
    for (int c = 0; c < dim; ++c) {
        if (obs[c] <= lo[c] || obs[c] >= hi[c]) {
            out.status = FitStatus::SuspectedNonexistence;
            return out;
        }
    }

    auto objective = [&](const Eigen::VectorXd& th) {
        double f = th.dot(obs);
        for (const ExactTable* t : tables) f -= table_log_normalizer(*t, th);
        return f;
    };

    double f = objective(out.theta);
    out.status = FitStatus::MaxIterations;
    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        out.iterations = iter;
        Eigen::VectorXd grad = obs;
        Eigen::MatrixXd info = Eigen::MatrixXd::Zero(dim, dim);
        for (const ExactTable* t : tables) {
            grad -= table_mean(*t, out.theta);
            info += table_information(*t, out.theta);
        }
        out.grad_norm = grad.lpNorm<Eigen::Infinity>();
        if (out.grad_norm <= cfg.grad_tol) {
            out.status = FitStatus::Converged;
            return out;
        }
        info.diagonal().array() += 1e-12 * std::max(1.0, info.trace() / dim);
        Eigen::VectorXd step = info.ldlt().solve(grad);
        double scale = 1.0;
        Eigen::VectorXd cand = out.theta + step;
        double f_cand = objective(cand);
        int halvings = 0;
        // Decrease test with rounding slack: near the optimum the true change in
        // f is below its floating-point resolution, and halving on noise would
        // freeze the iteration before the gradient tolerance is reached.
        double f_slack = 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f));
        while (f_cand < f - f_slack && halvings < cfg.max_halvings) {
            scale *= 0.5;
            cand = out.theta + scale * step;
            f_cand = objective(cand);
            ++halvings;
        }
        out.theta = cand;
        f = f_cand;
        if (out.theta.lpNorm<Eigen::Infinity>() > cfg.theta_cap) {
            out.status = FitStatus::SuspectedNonexistence;
            return out;
        }
    }
    return out;
}

} // namespace

ExactMleResult ExactModel::mle(const StatVector& observed, const ExactMleConfig& config) const {
    if (static_cast<int>(observed.size()) != spec_.dim()) {
        throw DataError("exact_mle: statistic vector has wrong length");
    }
    std::vector<const ExactTable*> within_tables, between_tables;
    for (const auto& t : tables_) {
        (t.within ? within_tables : between_tables).push_back(&t);
    }
    Eigen::VectorXd obs_w(spec_.p()), obs_b(spec_.q());
    for (int c = 0; c < spec_.p(); ++c) obs_w[c] = static_cast<double>(observed[static_cast<std::size_t>(c)]);
    for (int c = 0; c < spec_.q(); ++c) {
        obs_b[c] = static_cast<double>(observed[static_cast<std::size_t>(spec_.p() + c)]);
    }

    GroupSolve sw = solve_group(within_tables, obs_w, config);
    GroupSolve sb = solve_group(between_tables, obs_b, config);

    ExactMleResult out;
    out.theta = {sw.theta, sb.theta};
    out.iterations = std::max(sw.iterations, sb.iterations);
    out.grad_norm = std::max(sw.grad_norm, sb.grad_norm);
    if (sw.status == FitStatus::SuspectedNonexistence || sb.status == FitStatus::SuspectedNonexistence) {
        out.status = FitStatus::SuspectedNonexistence;
    } else if (sw.status == FitStatus::MaxIterations || sb.status == FitStatus::MaxIterations) {
        out.status = FitStatus::MaxIterations;
    } else {
        out.status = FitStatus::Converged;
    }
    return out;
}

ExactMleResult ExactModel::mle(const LocalGraph& g, const ExactMleConfig& config) const {
    return mle(compute_statistics(g, spec_), config);
}

} // namespace ldrg
