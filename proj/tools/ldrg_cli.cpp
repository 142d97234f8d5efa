#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ldrg/diagnostics.hpp"
#include "ldrg/exact.hpp"
#include "ldrg/inference.hpp"
#include "ldrg/io.hpp"
#include "ldrg/mcmle.hpp"
#include "ldrg/model.hpp"
#include "ldrg/sampler.hpp"
#include "ldrg/studies.hpp"

namespace {

using nlohmann::json;

json num_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

json vec_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

json mat_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

std::string edges_csv(const ldrg::LocalGraph& g) {
    std::string out = "i,j\n";
    for (auto [i, j] : g.collect_edges()) {
        out += std::to_string(i + 1) + "," + std::to_string(j + 1) + "\n";
    }
    return out;
}

json graph_json(const ldrg::LocalGraph& g, const ldrg::ModelSpec& spec) {
    json out;
    out["n_nodes"] = g.partition().n_nodes();
    json edges = json::array();
    for (auto [i, j] : g.collect_edges()) edges.push_back({i + 1, j + 1});
    out["edges"] = edges;
    ldrg::StatVector stats = compute_statistics(g, spec);
    json s = json::object();
    std::vector<std::string> names = spec.term_names();
    for (std::size_t c = 0; c < names.size(); ++c) s[names[c]] = stats[c];
    out["statistics"] = s;
    return out;
}

int effective_threads(int requested) {
    if (requested > 0) return requested;
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    return hw > 0 ? hw : 1;
}

struct SimulateArgs {
    std::string blocks, model, out;
    std::string format = "csv";
    std::uint64_t seed = 0;
    int n = 1;
    double burnin = 10.0;
    double interval = 1.0;
    bool skip_between = false;
    bool stats_only = false;
};

int run_simulate(const SimulateArgs& a) {
    auto part = ldrg::read_blocks_tsv(a.blocks);
    ldrg::ParsedModel parsed = ldrg::load_model_config(a.model, part);
    if (!parsed.theta) throw ldrg::DataError("simulate: model config must provide theta");
    if (a.n < 1) throw ldrg::DataError("simulate: --n must be positive");
    if (a.out.empty() && a.n > 1) throw ldrg::DataError("simulate: --n > 1 requires --out");
    ldrg::SamplerOptions opts{a.burnin, a.interval};

    std::string started = ldrg::iso_timestamp_now();
    if (!a.out.empty()) std::filesystem::create_directories(a.out);
    std::vector<std::string> outputs;
    std::vector<std::string> names = parsed.spec.term_names();
    std::ostringstream stats_csv;
    for (std::size_t c = 0; c < names.size(); ++c) {
        stats_csv << (c ? "," : "") << names[c];
    }
    stats_csv << '\n';

    for (int r = 0; r < a.n; ++r) {
        ldrg::LocalGraph g =
            ldrg::sample_graph(parsed.spec, *parsed.theta, a.seed, r, opts, a.skip_between);
        ldrg::StatVector stats = compute_statistics(g, parsed.spec);
        for (std::size_t c = 0; c < stats.size(); ++c) {
            stats_csv << (c ? "," : "") << stats[c];
        }
        stats_csv << '\n';
        if (a.out.empty()) {
            std::cout << (a.format == "json" ? graph_json(g, parsed.spec).dump(2) + "\n"
                                             : edges_csv(g));
        } else if (!a.stats_only) {
            char name[32];
            std::snprintf(name, sizeof(name), "sim_%04d.%s", r + 1,
                          a.format == "json" ? "json" : "csv");
            ldrg::write_text_file(
                a.out + "/" + name,
                a.format == "json" ? graph_json(g, parsed.spec).dump(2) + "\n" : edges_csv(g));
            outputs.emplace_back(name);
        }
    }
    if (!a.out.empty()) {
        ldrg::write_text_file(a.out + "/stats.csv", stats_csv.str());
        outputs.insert(outputs.begin(), "stats.csv");
        json config;
        config["model"] = ldrg::model_config_echo(parsed.spec, parsed.theta);
        config["n"] = a.n;
        config["burnin_multiplier"] = a.burnin;
        config["interval_multiplier"] = a.interval;
        config["skip_between"] = a.skip_between;
        config["stats_only"] = a.stats_only;
        config["format"] = a.format;
        ldrg::RunMeta meta{started, ldrg::iso_timestamp_now(), 1};
        ldrg::write_run_manifest(a.out, config, a.seed, "simulate", outputs, meta);
    }
    return 0;
}

struct FitArgs {
    std::string blocks, edges, model, out;
    std::string info_source = "mc";
    std::uint64_t seed = 0;
    std::int64_t n_mcmc = 20000;
    double ci_alpha = 0.05;
    bool with_ci = false;
};

int run_fit(const FitArgs& a) {
    auto part = ldrg::read_blocks_tsv(a.blocks);
    ldrg::ParsedModel parsed = ldrg::load_model_config(a.model, part);
    ldrg::LocalGraph g = ldrg::read_edges_tsv(a.edges, part);

    std::string started = ldrg::iso_timestamp_now();
    ldrg::FitConfig cfg;
    cfg.n_mcmc = a.n_mcmc;
    cfg.seed = a.seed;
    ldrg::FitResult fit = fit_model(g, parsed.spec, cfg);

    json out = ldrg::fit_result_to_json(fit, parsed.spec);
    if (a.with_ci && fit.status != ldrg::FitStatus::SuspectedNonexistence) {
        Eigen::MatrixXd s_within = fit.info_within;
        Eigen::MatrixXd s_between = fit.info_between;
        if (a.info_source == "blocks") {
            ldrg::InfoEstimate est = fisher_hat(g, parsed.spec);
            s_within = est.within_full;
            s_between = est.between_full;
        }
        auto ci_json = [](const std::vector<ldrg::CiEntry>& entries) {
            json arr = json::array();
            for (const auto& e : entries) {
                arr.push_back({{"estimate", e.estimate},
                               {"se", e.se},
                               {"lower", e.lower},
                               {"upper", e.upper}});
            }
            return arr;
        };
        out["ci_alpha"] = a.ci_alpha;
        out["ci_info_source"] = a.info_source;
        if (parsed.spec.p() > 0) {
            out["ci_within"] = ci_json(ldrg::wald_ci(fit.theta.within, s_within, a.ci_alpha));
        }
        if (parsed.spec.q() > 0) {
            out["ci_between"] = ci_json(ldrg::wald_ci(fit.theta.between, s_between, a.ci_alpha));
        }
    }
    std::cout << out.dump(2) << '\n';

    if (!a.out.empty()) {
        std::filesystem::create_directories(a.out);
        ldrg::write_text_file(a.out + "/fit.json", out.dump(2) + "\n");
        json config;
        config["model"] = ldrg::model_config_echo(parsed.spec, std::nullopt);
        config["n_mcmc"] = a.n_mcmc;
        ldrg::RunMeta meta{started, ldrg::iso_timestamp_now(), 1};
        ldrg::write_run_manifest(a.out, config, a.seed, "fit", {"fit.json"}, meta);
    }
    if (fit.status == ldrg::FitStatus::SuspectedNonexistence) {
        std::cerr << "error: suspected nonexistence of the maximum likelihood estimate\n";
        return 3;
    }
    return 0;
}

struct ExactArgs {
    std::string blocks, model, edges, out;
};

int run_exact(const ExactArgs& a) {
    auto part = ldrg::read_blocks_tsv(a.blocks);
    ldrg::ParsedModel parsed = ldrg::load_model_config(a.model, part);
    std::string started = ldrg::iso_timestamp_now();
    ldrg::ExactModel exact(part, parsed.spec);
    ldrg::ParamVector theta =
        parsed.theta ? *parsed.theta : ldrg::ParamVector::zeros(parsed.spec.p(), parsed.spec.q());

    json out;
    out["theta_within"] = vec_to_json(theta.within);
    out["theta_between"] = vec_to_json(theta.between);
    out["log_normalizer"] = exact.log_normalizer(theta);
    auto [mean_w, mean_b] = exact.mean_value(theta);
    out["mean_within"] = vec_to_json(mean_w);
    out["mean_between"] = vec_to_json(mean_b);
    auto [info_w, info_b] = exact.fisher_information(theta);
    out["info_within"] = mat_to_json(info_w);
    out["info_between"] = mat_to_json(info_b);

    bool nonexistence = false;
    if (!a.edges.empty()) {
        ldrg::LocalGraph g = ldrg::read_edges_tsv(a.edges, part);
        out["observed"] = compute_statistics(g, parsed.spec);
        out["log_likelihood"] = exact.log_likelihood(theta, g);
        ldrg::ExactMleResult mle = exact.mle(g);
        json m;
        m["theta_within"] = vec_to_json(mle.theta.within);
        m["theta_between"] = vec_to_json(mle.theta.between);
        m["status"] = to_string(mle.status);
        m["iterations"] = mle.iterations;
        m["grad_norm"] = mle.grad_norm;
        out["mle"] = m;
        nonexistence = mle.status == ldrg::FitStatus::SuspectedNonexistence;
    }
    std::cout << out.dump(2) << '\n';

    if (!a.out.empty()) {
        std::filesystem::create_directories(a.out);
        ldrg::write_text_file(a.out + "/exact.json", out.dump(2) + "\n");
        json config;
        config["model"] = ldrg::model_config_echo(parsed.spec, parsed.theta);
        ldrg::RunMeta meta{started, ldrg::iso_timestamp_now(), 1};
        ldrg::write_run_manifest(a.out, config, 0, "exact", {"exact.json"}, meta);
    }
    if (nonexistence) {
        std::cerr << "error: suspected nonexistence of the maximum likelihood estimate\n";
        return 3;
    }
    return 0;
}

struct DiagnoseArgs {
    std::string blocks, edges, model, out;
    double c = 1.0;
};

int run_diagnose(const DiagnoseArgs& a) {
    auto part = ldrg::read_blocks_tsv(a.blocks);
    ldrg::ParsedModel parsed = ldrg::load_model_config(a.model, part);
    ldrg::LocalGraph g = ldrg::read_edges_tsv(a.edges, part);
    std::string started = ldrg::iso_timestamp_now();

    ldrg::InfoEstimate est = fisher_hat(g, parsed.spec);
    ldrg::TheoryQuantities tq = theory_quantities(*part, est.within_full, est.between_full);
    ldrg::BoundRecord bounds = bound_expressions(tq, a.c);

    json out;
    out["observed"] = compute_statistics(g, parsed.spec);
    out["info_within_avg"] = mat_to_json(est.within_avg);
    out["info_between_avg"] = mat_to_json(est.between_avg);
    json t;
    t["n"] = tq.n;
    t["blocks"] = tq.k;
    t["block_size_avg"] = tq.a_avg;
    t["block_size_max"] = tq.a_max;
    t["p"] = tq.p;
    t["q"] = tq.q;
    t["lambda_max_within"] = tq.lambda_max_within;
    t["lambda_min_within"] = tq.lambda_min_within;
    t["lambda_max_between"] = tq.lambda_max_between;
    t["lambda_min_between"] = tq.lambda_min_between;
    t["singular_warning"] = tq.singular_warning;
    t["eps_ball"] = tq.eps_ball;
    out["theory"] = t;
    json b;
    b["c"] = a.c;
    b["within_bound"] = num_or_null(bounds.within_bound);
    b["between_bound"] = num_or_null(bounds.between_bound);
    b["a_max_ceiling"] = num_or_null(bounds.a_max_ceiling);
    b["a_max_ok"] = bounds.a_max_ok;
    out["bounds"] = b;
    std::cout << out.dump(2) << '\n';

    if (!a.out.empty()) {
        std::filesystem::create_directories(a.out);
        ldrg::write_text_file(a.out + "/diagnose.json", out.dump(2) + "\n");
        json config;
        config["model"] = ldrg::model_config_echo(parsed.spec, std::nullopt);
        config["c"] = a.c;
        ldrg::RunMeta meta{started, ldrg::iso_timestamp_now(), 1};
        ldrg::write_run_manifest(a.out, config, 0, "diagnose", {"diagnose.json"}, meta);
    }
    return 0;
}

struct StudyArgs {
    std::string config, case_name, out;
    std::uint64_t seed = 0;
    int threads = 0;
    bool have_case = false, have_seed = false, have_threads = false;
};

bool is_study1_case(ldrg::StudyCase c) {
    return c == ldrg::StudyCase::Study1Case1 || c == ldrg::StudyCase::Study1Case2 ||
           c == ldrg::StudyCase::Study1Case3;
}

int run_study(bool study1, const StudyArgs& a) {
    const char* command = study1 ? "study1" : "study2";
    ldrg::StudyConfig cfg;
    if (!a.config.empty()) {
        json j;
        try {
            j = json::parse(ldrg::read_text_file(a.config));
        } catch (const json::parse_error& e) {
            throw ldrg::DataError(a.config + ": invalid JSON: " + e.what());
        }
        cfg = ldrg::study_config_from_json(j);
    } else if (a.have_case) {
        cfg.study_case = ldrg::parse_study_case(a.case_name);
        if (!study1) {
            cfg.n_values = {250};
            cfg.replications = 200;
        }
    } else {
        throw ldrg::DataError(std::string(command) + ": provide --config or --case");
    }
    if (a.have_case && !a.config.empty()) cfg.study_case = ldrg::parse_study_case(a.case_name);
    if (a.have_seed) cfg.seed = a.seed;
    if (a.have_threads) cfg.threads = a.threads;
    if (is_study1_case(cfg.study_case) != study1) {
        throw ldrg::DataError(std::string(command) + ": case " + to_string(cfg.study_case) +
                              " belongs to the other study");
    }

    ldrg::RunMeta meta;
    meta.started = ldrg::iso_timestamp_now();
    meta.thread_count = effective_threads(cfg.threads);
    if (study1) {
        ldrg::Study1Result result = run_study1(cfg);
        meta.finished = ldrg::iso_timestamp_now();
        ldrg::write_study1_outputs(a.out, cfg, result, meta);
    } else {
        ldrg::Study2Result result = run_study2(cfg);
        meta.finished = ldrg::iso_timestamp_now();
        ldrg::write_study2_outputs(a.out, cfg, result, meta);
    }
    std::cout << ldrg::read_text_file(a.out + "/summary.json");
    return 0;
}

struct QqArgs {
    std::string in, out;
};

int run_qq(const QqArgs& a) {
    std::string content;
    if (a.in.empty()) {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        content = ss.str();
    } else {
        content = ldrg::read_text_file(a.in);
    }
    std::vector<double> values;
    std::istringstream ss(content);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        std::istringstream fs(line);
        std::string field;
        if (!(fs >> field)) continue;
        std::size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(field, &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != field.size()) {
            throw ldrg::DataError("qq: line " + std::to_string(line_no) + ": '" + field +
                                  "' is not a number");
        }
        values.push_back(v);
    }
    if (values.empty()) throw ldrg::DataError("qq: no input values");

    auto points = ldrg::qq_points(std::move(values));
    std::ostringstream csv;
    csv << "theoretical,empirical\n";
    for (const auto& [theoretical, empirical] : points) {
        csv << ldrg::format_csv_double(theoretical) << ',' << ldrg::format_csv_double(empirical)
            << '\n';
    }
    if (a.out.empty()) {
        std::cout << csv.str();
    } else {
        ldrg::write_text_file(a.out, csv.str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "ldrg: exponential-family random graph models with local dependence.\n"
        "Exit codes: 0 success, 1 usage error, 2 data or model error, 3 numerical failure."};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("ldrg ") + ldrg::kToolVersion);

    SimulateArgs sim;
    CLI::App* sim_cmd = app.add_subcommand(
        "simulate", "Draw graphs from a model; edge list CSV (columns: i,j) or JSON");
    sim_cmd->add_option("--blocks", sim.blocks, "Blocks file (node_id, block_id, ...)")->required();
    sim_cmd->add_option("--model", sim.model, "Model config JSON with theta")->required();
    sim_cmd->add_option("--seed", sim.seed, "Root seed (default 0)");
    sim_cmd->add_option("--n", sim.n, "Number of independent draws (default 1)");
    sim_cmd->add_option("--burnin", sim.burnin, "Burn-in proposals per edge variable (default 10)");
    sim_cmd->add_option("--interval", sim.interval, "Spacing multiplier between draws (default 1)");
    sim_cmd->add_flag("--skip-between", sim.skip_between, "Leave between-block subgraphs empty");
    sim_cmd->add_flag("--stats-only", sim.stats_only, "Write stats.csv without per-draw edge lists");
    sim_cmd->add_option("--out", sim.out,
                        "Output directory: stats.csv (columns: term names, one row per draw) "
                        "plus per-draw edge lists (required for --n > 1)");
    sim_cmd->add_option("--format", sim.format, "Edge list format (default csv)")
        ->check(CLI::IsMember({"csv", "json"}));

    FitArgs fit;
    CLI::App* fit_cmd =
        app.add_subcommand("fit", "Monte-Carlo maximum likelihood fit; result JSON on stdout");
    fit_cmd->add_option("--blocks", fit.blocks, "Blocks file")->required();
    fit_cmd->add_option("--edges", fit.edges, "Edges file (columns: i, j)")->required();
    fit_cmd->add_option("--model", fit.model, "Model config JSON")->required();
    fit_cmd->add_option("--seed", fit.seed, "Root seed (default 0)");
    fit_cmd->add_option("--n-mcmc", fit.n_mcmc, "MCMC sample size per iteration (default 20000)");
    CLI::Option* ci_opt =
        fit_cmd->add_option("--ci", fit.ci_alpha, "Add Wald intervals at this alpha");
    fit_cmd->add_option("--info", fit.info_source,
                        "Interval statistic covariance: mc (MC sample at the estimate) or "
                        "blocks (block-replicate estimator)")
        ->check(CLI::IsMember({"mc", "blocks"}));
    fit_cmd->add_option("--out", fit.out, "Also write fit.json and manifest.json here");

    ExactArgs exact;
    CLI::App* exact_cmd = app.add_subcommand(
        "exact", "Enumeration-backed normalizer, means, information, and MLE (small blocks)");
    exact_cmd->add_option("--blocks", exact.blocks, "Blocks file")->required();
    exact_cmd->add_option("--model", exact.model, "Model config JSON (theta optional, default 0)")
        ->required();
    exact_cmd->add_option("--edges", exact.edges, "Edges file; adds log-likelihood and exact MLE");
    exact_cmd->add_option("--out", exact.out, "Also write exact.json and manifest.json here");

    DiagnoseArgs diag;
    CLI::App* diag_cmd = app.add_subcommand(
        "diagnose", "Information estimates from one graph plus error-bound expressions");
    diag_cmd->add_option("--blocks", diag.blocks, "Blocks file")->required();
    diag_cmd->add_option("--edges", diag.edges, "Edges file")->required();
    diag_cmd->add_option("--model", diag.model, "Model config JSON")->required();
    diag_cmd->add_option("--c", diag.c, "Bound constant (default 1)");
    diag_cmd->add_option("--out", diag.out, "Also write diagnose.json and manifest.json here");

    StudyArgs s1;
    CLI::App* s1_cmd = app.add_subcommand(
        "study1", "Estimation-error study; errors.csv columns: case,n,replication,status,l2_error");
    s1_cmd->add_option("--config", s1.config, "Study config JSON");
    s1_cmd->add_option("--case", s1.case_name, "study1_case1 | study1_case2 | study1_case3");
    s1_cmd->add_option("--seed", s1.seed, "Override the config seed");
    s1_cmd->add_option("--threads", s1.threads, "Worker threads (default: hardware)");
    s1_cmd->add_option("--out", s1.out, "Output directory")->required();

    StudyArgs s2;
    CLI::App* s2_cmd = app.add_subcommand(
        "study2",
        "Coverage study; coverage.csv columns: case,n,replication,status,theta_star,theta_hat,"
        "se,lower,upper,covered,standardized; qq.csv columns: n,theoretical,empirical");
    s2_cmd->add_option("--config", s2.config, "Study config JSON");
    s2_cmd->add_option("--case", s2.case_name, "study2_case1 | study2_case2");
    s2_cmd->add_option("--seed", s2.seed, "Override the config seed");
    s2_cmd->add_option("--threads", s2.threads, "Worker threads (default: hardware)");
    s2_cmd->add_option("--out", s2.out, "Output directory")->required();

    QqArgs qq;
    CLI::App* qq_cmd = app.add_subcommand(
        "qq", "Normal QQ points of values (one per line); columns: theoretical,empirical");
    qq_cmd->add_option("--in", qq.in, "Input file (default stdin)");
    qq_cmd->add_option("--out", qq.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim_cmd->parsed()) return run_simulate(sim);
        if (fit_cmd->parsed()) {
            fit.with_ci = ci_opt->count() > 0;
            return run_fit(fit);
        }
        if (exact_cmd->parsed()) return run_exact(exact);
        if (diag_cmd->parsed()) return run_diagnose(diag);
        if (s1_cmd->parsed() || s2_cmd->parsed()) {
            bool study1 = s1_cmd->parsed();
            StudyArgs& a = study1 ? s1 : s2;
            CLI::App* cmd = study1 ? s1_cmd : s2_cmd;
            a.have_case = cmd->count("--case") > 0;
            a.have_seed = cmd->count("--seed") > 0;
            a.have_threads = cmd->count("--threads") > 0;
            return run_study(study1, a);
        }
        if (qq_cmd->parsed()) return run_qq(qq);
    } catch (const ldrg::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ldrg::NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
