#include "ldrg/studies.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ldrg/diagnostics.hpp"
#include "ldrg/inference.hpp"
#include "ldrg/parallel.hpp"
#include "ldrg/rng.hpp"
#include "ldrg/sampler.hpp"

namespace ldrg {

namespace {

constexpr std::uint64_t kTagTheta = 0x7133a;
constexpr std::uint64_t kTagSim = 0x51b;
constexpr std::uint64_t kTagFit = 0xf17;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int ceil_guarded(double v) {
    return static_cast<int>(std::ceil(v - 1e-9));
}

} // namespace

const char* to_string(StudyCase c) {
    switch (c) {
        case StudyCase::Study1Case1: return "study1_case1";
        case StudyCase::Study1Case2: return "study1_case2";
        case StudyCase::Study1Case3: return "study1_case3";
        case StudyCase::Study2Case1: return "study2_case1";
        case StudyCase::Study2Case2: return "study2_case2";
    }
    return "unknown";
}

StudyCase parse_study_case(const std::string& name) {
    for (StudyCase c : {StudyCase::Study1Case1, StudyCase::Study1Case2, StudyCase::Study1Case3,
                        StudyCase::Study2Case1, StudyCase::Study2Case2}) {
        if (name == to_string(c)) return c;
    }
    throw DataError("unknown study case: " + name);
}

int case_group_count(StudyCase c, int n, int block_size) {
    switch (c) {
        case StudyCase::Study1Case1: return 3;
        case StudyCase::Study1Case2: return ceil_guarded(std::pow(static_cast<double>(n), 0.4));
        case StudyCase::Study1Case3: return ceil_guarded(std::sqrt(static_cast<double>(n)));
        case StudyCase::Study2Case1: return 4;
        case StudyCase::Study2Case2: return 2 * (n / block_size) - 1;
    }
    return 0;
}

std::pair<std::shared_ptr<const BlockPartition>, ModelSpec> build_case_model(
    StudyCase c, int n, int block_size, bool independent_edges) {
    if (block_size < 2) throw DataError("study: block size must be at least 2");
    if (n < block_size || n % block_size != 0) {
        throw DataError("study: N = " + std::to_string(n) +
                        " is not a positive multiple of the block size");
    }
    int m = case_group_count(c, n, block_size);
    if (m < 1) throw DataError("study: group count must be positive");
    if (m > block_size) {
        std::fprintf(stderr,
                     "warning: study case %s at N = %d needs %d node groups but blocks hold "
                     "%d nodes; groups %d..%d are empty\n",
                     to_string(c), n, m, block_size, block_size + 1, m);
    }
    std::vector<int> block_of(static_cast<std::size_t>(n));
    std::vector<int> group_of(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        block_of[static_cast<std::size_t>(i)] = i / block_size;
        group_of[static_cast<std::size_t>(i)] = (i % block_size) % m;
    }
    auto part = std::make_shared<BlockPartition>(BlockPartition::build(block_of, group_of, {}, m));
    std::vector<Term> within;
    within.reserve(static_cast<std::size_t>(m) + 1);
    for (int g = 0; g < m; ++g) {
        within.push_back({TermKind::WithinEdgesByNodeGroup, g, -1});
    }
    if (!independent_edges) within.push_back({TermKind::WithinTransitiveEdgesTotal, -1, -1});
    ModelSpec spec = ModelSpec::build(part, std::move(within), {});
    return {part, std::move(spec)};
}

ParamVector draw_case_theta(const StudyConfig& cfg, int n, int replication, const ModelSpec& spec) {
    Rng rng(derive_stream({cfg.seed, kTagTheta, static_cast<std::uint64_t>(cfg.study_case),
                           static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(replication)}));
    ParamVector theta = ParamVector::zeros(spec.p(), spec.q());
    int n_groups = spec.p() - (cfg.independent_edges ? 0 : 1);
    for (int g = 0; g < n_groups; ++g) {
        theta.within[g] =
            cfg.theta_group_low + (cfg.theta_group_high - cfg.theta_group_low) * rng.next_double();
    }
    if (!cfg.independent_edges) theta.within[spec.p() - 1] = cfg.theta_transitive;
    return theta;
}

double quantile_type7(std::vector<double> values, double prob) {
    if (values.empty()) throw DataError("quantile: empty sample");
    if (!(prob >= 0 && prob <= 1)) throw DataError("quantile: probability outside [0, 1]");
    std::sort(values.begin(), values.end());
    double h = (static_cast<double>(values.size()) - 1) * prob;
    auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    double frac = h - std::floor(h);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

namespace {

void validate_config(const StudyConfig& cfg) {
    if (cfg.n_values.empty()) throw DataError("study: no N values");
    if (cfg.replications < 1) throw DataError("study: replications must be positive");
    if (!(cfg.theta_group_low <= cfg.theta_group_high)) {
        throw DataError("study: theta group range is inverted");
    }
    if (!(cfg.alpha > 0 && cfg.alpha < 1)) throw DataError("study: alpha must lie in (0, 1)");
    for (std::size_t i = 1; i < cfg.n_values.size(); ++i) {
        if (cfg.n_values[i] <= cfg.n_values[i - 1]) {
            throw DataError("study: N values must be strictly increasing");
        }
    }
}

struct CasePrep {
    std::shared_ptr<const BlockPartition> part;
    ModelSpec spec;
};

std::vector<CasePrep> prepare_cases(const StudyConfig& cfg) {
    std::vector<CasePrep> preps;
    preps.reserve(cfg.n_values.size());
    for (int n : cfg.n_values) {
        auto [part, spec] = build_case_model(cfg.study_case, n, cfg.block_size, cfg.independent_edges);
        preps.push_back({std::move(part), std::move(spec)});
    }
    return preps;
}

FitConfig replication_fit_config(const StudyConfig& cfg, int n, int rep) {
    FitConfig fc = cfg.fit;
    fc.n_mcmc = cfg.n_mcmc;
    fc.seed = derive_stream({cfg.seed, kTagFit, static_cast<std::uint64_t>(cfg.study_case),
                             static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep)});
    return fc;
}

LocalGraph simulate_replication(const StudyConfig& cfg, const CasePrep& prep, int n, int rep,
                                const ParamVector& theta_star) {
    std::uint64_t root = derive_stream({cfg.seed, kTagSim, static_cast<std::uint64_t>(cfg.study_case),
                                        static_cast<std::uint64_t>(n)});
    SamplerOptions opts;
    opts.burnin_multiplier = cfg.sim_burnin_multiplier;
    return sample_graph(prep.spec, theta_star, root, rep, opts, /*skip_between=*/true);
}

} // namespace

Study1Result run_study1(const StudyConfig& cfg) {
    validate_config(cfg);
    auto preps = prepare_cases(cfg);
    auto n_cases = static_cast<std::int64_t>(cfg.n_values.size());
    std::int64_t reps = cfg.replications;

    Study1Result out;
    out.rows.resize(static_cast<std::size_t>(n_cases * reps));
    parallel_for(n_cases * reps, cfg.threads, [&](std::int64_t item) {
        auto ni = static_cast<std::size_t>(item / reps);
        int rep = static_cast<int>(item % reps);
        int n = cfg.n_values[ni];
        const CasePrep& prep = preps[ni];
        ParamVector theta_star = draw_case_theta(cfg, n, rep, prep.spec);
        LocalGraph g = simulate_replication(cfg, prep, n, rep, theta_star);
        FitResult fr = fit_model(g, prep.spec, replication_fit_config(cfg, n, rep));
        Study1Row row;
        row.n = n;
        row.replication = rep;
        row.status = fr.status;
        row.l2_error = fr.status == FitStatus::SuspectedNonexistence
                           ? kNaN
                           : (fr.theta.within - theta_star.within).norm();
        out.rows[static_cast<std::size_t>(item)] = row;
    });

    std::map<int, double> q95_by_n;
    std::map<int, int> p_by_n;
    for (std::size_t ni = 0; ni < preps.size(); ++ni) {
        int n = cfg.n_values[ni];
        Study1Summary s;
        s.n = n;
        s.p = preps[ni].spec.p();
        std::vector<double> errors;
        for (std::int64_t rep = 0; rep < reps; ++rep) {
            const auto& row = out.rows[static_cast<std::size_t>(ni * reps + rep)];
            if (std::isnan(row.l2_error)) {
                ++s.n_failed;
            } else {
                ++s.n_ok;
                errors.push_back(row.l2_error);
            }
        }
        s.q95 = errors.empty() ? kNaN : quantile_type7(errors, 0.95);
        if (!errors.empty()) {
            q95_by_n[n] = s.q95;
            p_by_n[n] = s.p;
        }
        out.summary.push_back(s);
    }
    if (!q95_by_n.empty()) {
        PredictedError pe = predicted_error(q95_by_n, p_by_n);
        out.c_mean = pe.c_mean;
        for (auto& s : out.summary) {
            if (auto it = pe.c_by_n.find(s.n); it != pe.c_by_n.end()) {
                s.c_n = it->second;
                s.e_n = pe.e_by_n.at(s.n);
            } else {
                s.c_n = kNaN;
                s.e_n = kNaN;
            }
        }
    } else {
        out.c_mean = kNaN;
        for (auto& s : out.summary) {
            s.c_n = kNaN;
            s.e_n = kNaN;
        }
    }
    return out;
}

Study2Result run_study2(const StudyConfig& cfg) {
    validate_config(cfg);
    auto preps = prepare_cases(cfg);
    auto n_cases = static_cast<std::int64_t>(cfg.n_values.size());
    std::int64_t reps = cfg.replications;

    Study2Result out;
    out.rows.resize(static_cast<std::size_t>(n_cases * reps));
    parallel_for(n_cases * reps, cfg.threads, [&](std::int64_t item) {
        auto ni = static_cast<std::size_t>(item / reps);
        int rep = static_cast<int>(item % reps);
        int n = cfg.n_values[ni];
        const CasePrep& prep = preps[ni];
        int coord = prep.spec.p() - 1; // transitive-edge coordinate
        ParamVector theta_star = draw_case_theta(cfg, n, rep, prep.spec);
        LocalGraph g = simulate_replication(cfg, prep, n, rep, theta_star);
        FitResult fr = fit_model(g, prep.spec, replication_fit_config(cfg, n, rep));
        Study2Row row;
        row.n = n;
        row.replication = rep;
        row.status = fr.status;
        row.theta_star = theta_star.within[coord];
        row.theta_hat = kNaN;
        row.se = kNaN;
        row.lower = kNaN;
        row.upper = kNaN;
        row.standardized = kNaN;
        if (fr.status != FitStatus::SuspectedNonexistence) {
            row.theta_hat = fr.theta.within[coord];
            try {
                auto cis = wald_ci(fr.theta.within, fr.info_within, cfg.alpha);
                const CiEntry& ci = cis[static_cast<std::size_t>(coord)];
                row.se = ci.se;
                row.lower = ci.lower;
                row.upper = ci.upper;
                row.covered = ci.lower <= row.theta_star && row.theta_star <= ci.upper;
                row.standardized = (row.theta_hat - row.theta_star) / ci.se;
            } catch (const NumericError&) {
                // Singular statistic covariance: the replication is recorded
                // without an interval and excluded from coverage.
            }
        }
        out.rows[static_cast<std::size_t>(item)] = row;
    });

    for (std::size_t ni = 0; ni < preps.size(); ++ni) {
        int n = cfg.n_values[ni];
        Study2Summary s;
        s.n = n;
        s.p = preps[ni].spec.p();
        std::vector<double> standardized;
        int n_cov = 0;
        for (std::int64_t rep = 0; rep < reps; ++rep) {
            const auto& row = out.rows[static_cast<std::size_t>(ni * reps + rep)];
            if (std::isnan(row.se)) {
                ++s.n_failed;
            } else {
                ++s.n_ok;
                if (row.covered) ++n_cov;
                standardized.push_back(row.standardized);
            }
        }
        if (s.n_ok > 0) {
            s.coverage = static_cast<double>(n_cov) / s.n_ok;
            s.coverage_se = std::sqrt(s.coverage * (1 - s.coverage) / s.n_ok);
            out.qq[n] = qq_points(standardized);
        } else {
            s.coverage = kNaN;
            s.coverage_se = kNaN;
        }
        out.summary.push_back(s);
    }
    return out;
}

} // namespace ldrg
