#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ldrg/mcmle.hpp"
#include "ldrg/model.hpp"

namespace ldrg {

/// Simulation designs. Study-1 cases share one recipe and differ in how the
/// node-group count M grows with N: Case 1 fixes M = 3, Case 2 uses
/// ceil(N^(2/5)), Case 3 uses ceil(sqrt(N)). Study-2 cases fix p = 5
/// (M = 4) and p = 2K (M = 2K - 1).
enum class StudyCase {
    Study1Case1,
    Study1Case2,
    Study1Case3,
    Study2Case1,
    Study2Case2,
};

const char* to_string(StudyCase c);
StudyCase parse_study_case(const std::string& name);

struct StudyConfig {
    StudyCase study_case = StudyCase::Study1Case1;
    std::vector<int> n_values = {50, 250, 500};
    int block_size = 50;
    int replications = 100;
    double theta_transitive = 0.5;
    double theta_group_low = -1.5;
    double theta_group_high = -0.5;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    std::int64_t n_mcmc = 1500;
    /// Burn-in multiplier for generating the observed graph of each
    /// replication (one draw from an empty start gets extra margin).
    double sim_burnin_multiplier = 50.0;
    int threads = 0;
    /// Smoke mode: drop the transitive term, leaving an independent-edge
    /// model that Newton solves without trouble.
    bool independent_edges = false;
    FitConfig fit;
};

/// Node-group count for one study case at graph size n.
int case_group_count(StudyCase c, int n, int block_size);

/// Blocks of block_size consecutive nodes, groups assigned round-robin
/// within each block, plus the case's term list. Warns on stderr when some
/// group is empty in every block.
std::pair<std::shared_ptr<const BlockPartition>, ModelSpec> build_case_model(
    StudyCase c, int n, int block_size, bool independent_edges = false);

/// Data-generating parameter of one replication: group coefficients drawn
/// iid uniform on [low, high] from a stream fixed by
/// (seed, case, n, replication), transitive coefficient from the config.
ParamVector draw_case_theta(const StudyConfig& cfg, int n, int replication, const ModelSpec& spec);

struct Study1Row {
    int n = 0;
    int replication = 0;
    FitStatus status = FitStatus::Converged;
    double l2_error = 0;
};

struct Study1Summary {
    int n = 0;
    int p = 0;
    int n_ok = 0;
    int n_failed = 0;
    double q95 = 0;
    double c_n = 0;
    double e_n = 0;
};

struct Study1Result {
    std::vector<Study1Row> rows;
    std::vector<Study1Summary> summary;
    double c_mean = 0;
};

/// Estimation-error study: per replication draw theta*, simulate a graph
/// (between subgraphs empty with probability one), refit, record the
/// within-parameter l2 error; then the 95% quantile per N and the
/// predicted-error recipe across N.
Study1Result run_study1(const StudyConfig& cfg);

struct Study2Row {
    int n = 0;
    int replication = 0;
    FitStatus status = FitStatus::Converged;
    double theta_star = 0;
    double theta_hat = 0;
    double se = 0;
    double lower = 0;
    double upper = 0;
    bool covered = false;
    double standardized = 0;
};

struct Study2Summary {
    int n = 0;
    int p = 0;
    int n_ok = 0;
    int n_failed = 0;
    double coverage = 0;
    double coverage_se = 0;
};

struct Study2Result {
    std::vector<Study2Row> rows;
    std::vector<Study2Summary> summary;
    /// Standard-normal QQ points of the standardized estimates, per N.
    std::map<int, std::vector<std::pair<double, double>>> qq;
};

/// Coverage study: Wald intervals for the transitive-edge coefficient from
/// the inverse MC covariance of the sampled sufficient statistics.
Study2Result run_study2(const StudyConfig& cfg);

/// Type-7 (linear interpolation) quantile of a sample.
double quantile_type7(std::vector<double> values, double prob);

} // namespace ldrg
