#pragma once

#include <Eigen/Core>
#include <memory>
#include <utility>
#include <vector>

#include "ldrg/model.hpp"

namespace ldrg {

inline constexpr int kExactVarCap = 20;

/// Statistic slices of every state of one local subgraph, indexed by the
/// state's edge-variable bitmask. Holds 2^d * stat_dim int64 entries.
struct ExactTable {
    SubgraphRef ref;
    int d = 0;
    int stat_dim = 0;
    bool within = true;
    std::vector<std::int64_t> stats;
    StatVector stat_min, stat_max;

    const std::int64_t* row(std::uint64_t state) const {
        return stats.data() + static_cast<std::size_t>(state) * stat_dim;
    }
    std::int64_t n_states() const { return std::int64_t{1} << d; }
};

ExactTable build_exact_table(const ModelSpec& spec, SubgraphRef ref, int var_cap = kExactVarCap);

double table_log_normalizer(const ExactTable& t, const Eigen::VectorXd& theta_slice);
Eigen::VectorXd table_mean(const ExactTable& t, const Eigen::VectorXd& theta_slice);
Eigen::MatrixXd table_information(const ExactTable& t, const Eigen::VectorXd& theta_slice);
/// Probability of each state under the table's exponential family.
std::vector<double> table_distribution(const ExactTable& t, const Eigen::VectorXd& theta_slice);

enum class FitStatus { Converged, MaxIterations, SuspectedNonexistence };

const char* to_string(FitStatus s);

struct ExactMleConfig {
    int max_iterations = 100;
    double grad_tol = 1e-8;
    double theta_cap = 30.0;
    int max_halvings = 30;
};

struct ExactMleResult {
    ParamVector theta;
    FitStatus status = FitStatus::Converged;
    int iterations = 0;
    double grad_norm = 0.0;
};

/// Enumeration-backed model: one table per local subgraph. Every quantity
/// is a sum over tables, so cost is K + C(K, 2) tables of at most 2^var_cap
/// states each; construction throws when any subgraph exceeds the cap.
class ExactModel {
public:
    ExactModel(std::shared_ptr<const BlockPartition> partition, ModelSpec spec,
               int var_cap = kExactVarCap);

    const ModelSpec& spec() const { return spec_; }
    const BlockPartition& partition() const { return *part_; }
    const ExactTable& table(SubgraphRef ref) const;

    double log_normalizer(const ParamVector& theta) const;
    /// Exact expectation of the sufficient statistic, (within, between).
    std::pair<Eigen::VectorXd, Eigen::VectorXd> mean_value(const ParamVector& theta) const;
    /// Exact Fisher information, block diagonal over (within, between).
    std::pair<Eigen::MatrixXd, Eigen::MatrixXd> fisher_information(const ParamVector& theta) const;
    double log_likelihood(const ParamVector& theta, const LocalGraph& g) const;
    double log_likelihood(const ParamVector& theta, const StatVector& observed) const;

    ExactMleResult mle(const LocalGraph& g, const ExactMleConfig& config = {}) const;
    ExactMleResult mle(const StatVector& observed, const ExactMleConfig& config = {}) const;

    /// Exact law of one subgraph at theta, indexed by state bitmask.
    std::vector<double> state_distribution(SubgraphRef ref, const ParamVector& theta) const;

private:
    Eigen::VectorXd slice_of(const ParamVector& theta, const ExactTable& t) const;

    std::shared_ptr<const BlockPartition> part_;
    ModelSpec spec_;
    std::vector<ExactTable> tables_;
};

} // namespace ldrg
