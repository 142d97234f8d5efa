#include "ldrg/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ldrg {

namespace {

using nlohmann::json;

std::vector<std::string> split_fields(const std::string& line) {
    std::string normalized = line;
    std::replace(normalized.begin(), normalized.end(), ',', ' ');
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(normalized);
    while (ss >> field) out.push_back(field);
    return out;
}

long parse_int_field(const std::string& s, const std::string& where) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(s, &pos);
    } catch (const std::exception&) {
        throw DataError(where + ": '" + s + "' is not an integer");
    }
    if (pos != s.size()) throw DataError(where + ": '" + s + "' is not an integer");
    return v;
}

} // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << content;
    if (!out) throw DataError("write failed: " + path);
}

std::shared_ptr<const BlockPartition> read_blocks_tsv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty blocks file");
    auto header = split_fields(line);
    if (header.size() < 2 || header[0] != "node_id" || header[1] != "block_id") {
        throw DataError(path + ": header must start with 'node_id block_id'");
    }
    int group_col = -1, block_group_col = -1;
    for (std::size_t c = 2; c < header.size(); ++c) {
        if (header[c] == "node_group" && group_col < 0) {
            group_col = static_cast<int>(c);
        } else if (header[c] == "block_group" && block_group_col < 0) {
            block_group_col = static_cast<int>(c);
        } else {
            throw DataError(path + ": unknown blocks column '" + header[c] + "'");
        }
    }

    struct Row {
        long block;
        long group;
        long block_group;
    };
    std::map<long, Row> by_node;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_fields(line);
        if (fields.empty()) continue;
        std::string where = path + ":" + std::to_string(line_no);
        if (fields.size() != header.size()) {
            throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        }
        long node = parse_int_field(fields[0], where + " node_id");
        Row r{parse_int_field(fields[1], where + " block_id"), 0, 0};
        if (group_col >= 0) {
            r.group = parse_int_field(fields[static_cast<std::size_t>(group_col)], where + " node_group");
            if (r.group < 1) throw DataError(where + ": node_group must be a positive integer");
        }
        if (block_group_col >= 0) {
            r.block_group =
                parse_int_field(fields[static_cast<std::size_t>(block_group_col)], where + " block_group");
            if (r.block_group < 1) throw DataError(where + ": block_group must be a positive integer");
        }
        if (!by_node.emplace(node, r).second) {
            throw DataError(where + ": node " + std::to_string(node) + " listed twice");
        }
    }
    if (by_node.empty()) throw DataError(path + ": no nodes");
    long n = static_cast<long>(by_node.size());
    for (long i = 1; i <= n; ++i) {
        if (!by_node.count(i)) {
            throw DataError(path + ": node ids must cover 1.." + std::to_string(n) + "; " +
                            std::to_string(i) + " is missing");
        }
    }

    std::set<long> block_labels;
    for (const auto& [node, row] : by_node) {
        (void)node;
        block_labels.insert(row.block);
    }
    std::map<long, int> block_index;
    for (long label : block_labels) {
        block_index.emplace(label, static_cast<int>(block_index.size()));
    }

    std::vector<int> block_of(static_cast<std::size_t>(n));
    std::vector<int> group_of;
    if (group_col >= 0) group_of.resize(static_cast<std::size_t>(n));
    for (long i = 1; i <= n; ++i) {
        const Row& r = by_node.at(i);
        block_of[static_cast<std::size_t>(i - 1)] = block_index.at(r.block);
        if (group_col >= 0) group_of[static_cast<std::size_t>(i - 1)] = static_cast<int>(r.group - 1);
    }
    if (group_col >= 0) {
        long m = *std::max_element(group_of.begin(), group_of.end()) + 1;
        std::vector<bool> seen(static_cast<std::size_t>(m), false);
        for (int g : group_of) seen[static_cast<std::size_t>(g)] = true;
        for (long g = 0; g < m; ++g) {
            if (!seen[static_cast<std::size_t>(g)]) {
                throw DataError(path + ": node_group values must cover 1.." + std::to_string(m) +
                                "; group " + std::to_string(g + 1) + " is missing");
            }
        }
    }

    std::vector<int> block_group_of;
    if (block_group_col >= 0) {
        block_group_of.assign(block_labels.size(), -1);
        for (long i = 1; i <= n; ++i) {
            const Row& r = by_node.at(i);
            int k = block_index.at(r.block);
            int bg = static_cast<int>(r.block_group - 1);
            if (block_group_of[static_cast<std::size_t>(k)] < 0) {
                block_group_of[static_cast<std::size_t>(k)] = bg;
            } else if (block_group_of[static_cast<std::size_t>(k)] != bg) {
                throw DataError(path + ": block " + std::to_string(r.block) +
                                " has inconsistent block_group values");
            }
        }
        int l = *std::max_element(block_group_of.begin(), block_group_of.end()) + 1;
        std::vector<bool> seen(static_cast<std::size_t>(l), false);
        for (int g : block_group_of) seen[static_cast<std::size_t>(g)] = true;
        for (int g = 0; g < l; ++g) {
            if (!seen[static_cast<std::size_t>(g)]) {
                throw DataError(path + ": block_group values must cover 1.." + std::to_string(l) +
                                "; group " + std::to_string(g + 1) + " is missing");
            }
        }
    }

    return std::make_shared<BlockPartition>(BlockPartition::build(block_of, group_of, block_group_of));
}

LocalGraph read_edges_tsv(const std::string& path,
                          std::shared_ptr<const BlockPartition> partition) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty edges file");
    auto header = split_fields(line);
    if (header.size() != 2 || header[0] != "i" || header[1] != "j") {
        throw DataError(path + ": header must be 'i j'");
    }
    LocalGraph g(std::move(partition));
    int n = g.partition().n_nodes();
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_fields(line);
        if (fields.empty()) continue;
        std::string where = path + ":" + std::to_string(line_no);
        if (fields.size() != 2) throw DataError(where + ": expected 2 fields");
        long i = parse_int_field(fields[0], where + " i");
        long j = parse_int_field(fields[1], where + " j");
        if (i < 1 || i > n || j < 1 || j > n) {
            throw DataError(where + ": node id out of range 1.." + std::to_string(n));
        }
        if (i == j) throw DataError(where + ": self-loop at node " + std::to_string(i));
        if (g.has_edge(static_cast<int>(i - 1), static_cast<int>(j - 1))) {
            throw DataError(where + ": duplicate edge {" + std::to_string(i) + ", " +
                            std::to_string(j) + "}");
        }
        g.toggle_edge(static_cast<int>(i - 1), static_cast<int>(j - 1));
    }
    return g;
}

namespace {

int require_index(const json& descriptor, const char* key, const std::string& where) {
    if (!descriptor.contains(key)) {
        throw DataError("model config: " + where + ": missing key '" + key + "'");
    }
    const json& v = descriptor.at(key);
    if (!v.is_number_integer()) {
        throw DataError("model config: " + where + "." + key + ": must be an integer");
    }
    return v.get<int>();
}

Term parse_term(const json& descriptor, bool within_list, const std::string& where) {
    if (!descriptor.is_object()) {
        throw DataError("model config: " + where + ": descriptor must be an object");
    }
    if (!descriptor.contains("term") || !descriptor.at("term").is_string()) {
        throw DataError("model config: " + where + ": missing string key 'term'");
    }
    std::string name = descriptor.at("term").get<std::string>();
    std::set<std::string> allowed{"term"};
    Term t{};
    if (name == "within_edges") {
        t.kind = TermKind::WithinEdgesTotal;
    } else if (name == "within_edges_per_block") {
        t.kind = TermKind::WithinEdgesPerBlock;
        t.a = require_index(descriptor, "block", where) - 1;
        allowed.insert("block");
    } else if (name == "within_edges_by_node_group") {
        t.kind = TermKind::WithinEdgesByNodeGroup;
        t.a = require_index(descriptor, "group", where) - 1;
        allowed.insert("group");
    } else if (name == "within_transitive_edges") {
        t.kind = TermKind::WithinTransitiveEdgesTotal;
    } else if (name == "within_transitive_edges_by_block_group") {
        t.kind = TermKind::WithinTransitiveEdgesByBlockGroup;
        t.a = require_index(descriptor, "group", where) - 1;
        allowed.insert("group");
    } else if (name == "between_edges") {
        t.kind = TermKind::BetweenEdgesTotal;
    } else if (name == "between_edges_per_pair") {
        t.kind = TermKind::BetweenEdgesPerPair;
        if (!descriptor.contains("pair") || !descriptor.at("pair").is_array() ||
            descriptor.at("pair").size() != 2) {
            throw DataError("model config: " + where + ".pair: must be an array [k, l]");
        }
        t.a = descriptor.at("pair")[0].get<int>() - 1;
        t.b = descriptor.at("pair")[1].get<int>() - 1;
        allowed.insert("pair");
    } else {
        throw DataError("model config: " + where + ": unknown term '" + name + "'");
    }
    for (const auto& [key, value] : descriptor.items()) {
        (void)value;
        if (!allowed.count(key)) {
            throw DataError("model config: " + where + ": unexpected key '" + key + "'");
        }
    }
    if (t.within() != within_list) {
        throw DataError("model config: " + where + ": term '" + name + "' belongs in the " +
                        (t.within() ? "'within'" : "'between'") + " list");
    }
    return t;
}

Eigen::VectorXd parse_theta_side(const json& arr, int expected, const std::string& where) {
    if (!arr.is_array()) throw DataError("model config: " + where + ": must be an array");
    if (static_cast<int>(arr.size()) != expected) {
        throw DataError("model config: " + where + ": expected " + std::to_string(expected) +
                        " entries, got " + std::to_string(arr.size()));
    }
    Eigen::VectorXd v(expected);
    for (int c = 0; c < expected; ++c) {
        if (!arr[static_cast<std::size_t>(c)].is_number()) {
            throw DataError("model config: " + where + "[" + std::to_string(c) + "]: must be a number");
        }
        v[c] = arr[static_cast<std::size_t>(c)].get<double>();
    }
    return v;
}

} // namespace

ParsedModel parse_model_config(const json& config,
                               std::shared_ptr<const BlockPartition> partition) {
    if (!config.is_object()) throw DataError("model config: top level must be an object");
    for (const auto& [key, value] : config.items()) {
        (void)value;
        if (key != "within" && key != "between" && key != "theta" && key != "preset") {
            throw DataError("model config: unexpected key '" + key + "'");
        }
    }
    std::vector<Term> within, between;
    if (config.contains("preset")) {
        if (config.contains("within") || config.contains("between")) {
            throw DataError("model config: 'preset' cannot be combined with term lists");
        }
        std::string preset = config.at("preset").is_string() ? config.at("preset").get<std::string>() : "";
        if (preset != "sbm") throw DataError("model config: unknown preset '" + preset + "'");
        int kk = partition->n_blocks();
        for (int k = 0; k < kk; ++k) within.push_back({TermKind::WithinEdgesPerBlock, k, -1});
        for (int k = 0; k < kk; ++k) {
            for (int l = k + 1; l < kk; ++l) between.push_back({TermKind::BetweenEdgesPerPair, k, l});
        }
    } else {
        auto parse_list = [&](const char* key, bool within_list, std::vector<Term>& out) {
            if (!config.contains(key)) return;
            const json& arr = config.at(key);
            if (!arr.is_array()) {
                throw DataError(std::string("model config: '") + key + "' must be an array");
            }
            for (std::size_t i = 0; i < arr.size(); ++i) {
                out.push_back(parse_term(arr[i], within_list,
                                         std::string(key) + "[" + std::to_string(i) + "]"));
            }
        };
        parse_list("within", true, within);
        parse_list("between", false, between);
    }

    ParsedModel out{ModelSpec::build(partition, std::move(within), std::move(between)), std::nullopt};
    if (config.contains("theta")) {
        const json& th = config.at("theta");
        if (!th.is_object()) throw DataError("model config: theta: must be an object");
        for (const auto& [key, value] : th.items()) {
            (void)value;
            if (key != "within" && key != "between") {
                throw DataError("model config: theta: unexpected key '" + key + "'");
            }
        }
        ParamVector theta = ParamVector::zeros(out.spec.p(), out.spec.q());
        if (th.contains("within")) {
            theta.within = parse_theta_side(th.at("within"), out.spec.p(), "theta.within");
        } else if (out.spec.p() > 0) {
            throw DataError("model config: theta.within: missing (model has within terms)");
        }
        if (th.contains("between")) {
            theta.between = parse_theta_side(th.at("between"), out.spec.q(), "theta.between");
        } else if (out.spec.q() > 0) {
            throw DataError("model config: theta.between: missing (model has between terms)");
        }
        check_finite(theta, "model config theta");
        out.theta = std::move(theta);
    }
    return out;
}

ParsedModel load_model_config(const std::string& path,
                              std::shared_ptr<const BlockPartition> partition) {
    json config;
    try {
        config = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw DataError(path + ": invalid JSON: " + e.what());
    }
    return parse_model_config(config, std::move(partition));
}

nlohmann::json model_config_echo(const ModelSpec& spec, const std::optional<ParamVector>& theta) {
    json out;
    out["within"] = json::array();
    out["between"] = json::array();
    for (const auto& t : spec.within_terms()) {
        json d;
        switch (t.kind) {
            case TermKind::WithinEdgesTotal: d["term"] = "within_edges"; break;
            case TermKind::WithinEdgesPerBlock:
                d["term"] = "within_edges_per_block";
                d["block"] = t.a + 1;
                break;
            case TermKind::WithinEdgesByNodeGroup:
                d["term"] = "within_edges_by_node_group";
                d["group"] = t.a + 1;
                break;
            case TermKind::WithinTransitiveEdgesTotal: d["term"] = "within_transitive_edges"; break;
            case TermKind::WithinTransitiveEdgesByBlockGroup:
                d["term"] = "within_transitive_edges_by_block_group";
                d["group"] = t.a + 1;
                break;
            default: break;
        }
        out["within"].push_back(d);
    }
    for (const auto& t : spec.between_terms()) {
        json d;
        if (t.kind == TermKind::BetweenEdgesTotal) {
            d["term"] = "between_edges";
        } else {
            d["term"] = "between_edges_per_pair";
            d["pair"] = {t.a + 1, t.b + 1};
        }
        out["between"].push_back(d);
    }
    if (theta) {
        json th;
        th["within"] = std::vector<double>(theta->within.data(), theta->within.data() + theta->within.size());
        th["between"] =
            std::vector<double>(theta->between.data(), theta->between.data() + theta->between.size());
        out["theta"] = th;
    }
    return out;
}

std::uint64_t canonical_json_hash(const json& j) {
    std::string dump = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

nlohmann::json study_config_to_json(const StudyConfig& cfg) {
    json fit;
    fit["max_outer"] = cfg.fit.max_outer;
    fit["max_inner"] = cfg.fit.max_inner;
    fit["grad_tol"] = cfg.fit.grad_tol;
    fit["grad_t_max"] = cfg.fit.grad_t_max;
    fit["ess_fraction"] = cfg.fit.ess_fraction;
    fit["burnin_multiplier"] = cfg.fit.burnin_multiplier;
    fit["interval_multiplier"] = cfg.fit.interval_multiplier;
    fit["theta_cap"] = cfg.fit.theta_cap;
    fit["ridge"] = cfg.fit.ridge;

    json out;
    out["case"] = to_string(cfg.study_case);
    out["n_values"] = cfg.n_values;
    out["block_size"] = cfg.block_size;
    out["replications"] = cfg.replications;
    out["theta_transitive"] = cfg.theta_transitive;
    out["theta_group_low"] = cfg.theta_group_low;
    out["theta_group_high"] = cfg.theta_group_high;
    out["alpha"] = cfg.alpha;
    out["seed"] = cfg.seed;
    out["n_mcmc"] = cfg.n_mcmc;
    out["sim_burnin_multiplier"] = cfg.sim_burnin_multiplier;
    out["independent_edges"] = cfg.independent_edges;
    out["fit"] = fit;
    return out;
}

StudyConfig study_config_from_json(const json& j) {
    if (!j.is_object()) throw DataError("study config: top level must be an object");
    StudyConfig cfg;
    std::set<std::string> known{"case",
                                "n_values",
                                "block_size",
                                "replications",
                                "theta_transitive",
                                "theta_group_low",
                                "theta_group_high",
                                "alpha",
                                "seed",
                                "n_mcmc",
                                "sim_burnin_multiplier",
                                "threads",
                                "independent_edges",
                                "fit"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key)) throw DataError("study config: unknown key '" + key + "'");
    }
    if (!j.contains("case")) throw DataError("study config: missing key 'case'");
    cfg.study_case = parse_study_case(j.at("case").get<std::string>());
    if (j.contains("n_values")) cfg.n_values = j.at("n_values").get<std::vector<int>>();
    if (j.contains("block_size")) cfg.block_size = j.at("block_size").get<int>();
    if (j.contains("replications")) cfg.replications = j.at("replications").get<int>();
    if (j.contains("theta_transitive")) cfg.theta_transitive = j.at("theta_transitive").get<double>();
    if (j.contains("theta_group_low")) cfg.theta_group_low = j.at("theta_group_low").get<double>();
    if (j.contains("theta_group_high")) cfg.theta_group_high = j.at("theta_group_high").get<double>();
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("n_mcmc")) cfg.n_mcmc = j.at("n_mcmc").get<std::int64_t>();
    if (j.contains("sim_burnin_multiplier")) {
        cfg.sim_burnin_multiplier = j.at("sim_burnin_multiplier").get<double>();
    }
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    if (j.contains("independent_edges")) cfg.independent_edges = j.at("independent_edges").get<bool>();
    if (j.contains("fit")) {
        const json& f = j.at("fit");
        std::set<std::string> fit_known{"max_outer",         "max_inner",     "grad_tol",
                                        "grad_t_max",        "ess_fraction",  "burnin_multiplier",
                                        "interval_multiplier", "theta_cap",   "ridge"};
        for (const auto& [key, value] : f.items()) {
            (void)value;
            if (!fit_known.count(key)) throw DataError("study config: unknown key 'fit." + key + "'");
        }
        if (f.contains("max_outer")) cfg.fit.max_outer = f.at("max_outer").get<int>();
        if (f.contains("max_inner")) cfg.fit.max_inner = f.at("max_inner").get<int>();
        if (f.contains("grad_tol")) cfg.fit.grad_tol = f.at("grad_tol").get<double>();
        if (f.contains("grad_t_max")) cfg.fit.grad_t_max = f.at("grad_t_max").get<double>();
        if (f.contains("ess_fraction")) cfg.fit.ess_fraction = f.at("ess_fraction").get<double>();
        if (f.contains("burnin_multiplier")) {
            cfg.fit.burnin_multiplier = f.at("burnin_multiplier").get<double>();
        }
        if (f.contains("interval_multiplier")) {
            cfg.fit.interval_multiplier = f.at("interval_multiplier").get<double>();
        }
        if (f.contains("theta_cap")) cfg.fit.theta_cap = f.at("theta_cap").get<double>();
        if (f.contains("ridge")) cfg.fit.ridge = f.at("ridge").get<double>();
    }
    return cfg;
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

} // namespace

nlohmann::json fit_result_to_json(const FitResult& fit, const ModelSpec& spec) {
    json out;
    json terms_w = json::array(), terms_b = json::array();
    for (const auto& t : spec.within_terms()) terms_w.push_back(t.name());
    for (const auto& t : spec.between_terms()) terms_b.push_back(t.name());
    out["terms_within"] = terms_w;
    out["terms_between"] = terms_b;
    out["theta_within"] =
        std::vector<double>(fit.theta.within.data(), fit.theta.within.data() + fit.theta.within.size());
    out["theta_between"] = std::vector<double>(fit.theta.between.data(),
                                               fit.theta.between.data() + fit.theta.between.size());
    out["info_within"] = matrix_to_json(fit.info_within);
    out["info_between"] = matrix_to_json(fit.info_between);
    out["status"] = to_string(fit.status);
    out["outer_iterations_within"] = fit.outer_within;
    out["outer_iterations_between"] = fit.outer_between;
    out["ess_within"] = fit.ess_within;
    out["ess_between"] = fit.ess_between;
    out["n_mcmc"] = fit.n_mcmc;
    out["seed"] = fit.seed;
    return out;
}

std::string format_csv_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

namespace {

std::string hash_hex(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace

std::string iso_timestamp_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_run_manifest(const std::string& dir, const json& config, std::uint64_t root_seed,
                        const std::string& command, const std::vector<std::string>& outputs,
                        const RunMeta& meta) {
    json manifest;
    manifest["tool"] = "ldrg";
    manifest["tool_version"] = kToolVersion;
    manifest["command"] = command;
    manifest["config"] = config;
    manifest["config_hash"] = hash_hex(canonical_json_hash(config));
    manifest["root_seed"] = root_seed;
    manifest["started"] = meta.started.empty() ? iso_timestamp_now() : meta.started;
    manifest["finished"] = meta.finished.empty() ? iso_timestamp_now() : meta.finished;
    manifest["thread_count"] = meta.thread_count;
    manifest["outputs"] = outputs;
    write_text_file(dir + "/manifest.json", manifest.dump(2) + "\n");
}

void write_study1_outputs(const std::string& dir, const StudyConfig& cfg,
                          const Study1Result& result, const RunMeta& meta) {
    std::filesystem::create_directories(dir);
    std::ostringstream errors;
    errors << "case,n,replication,status,l2_error\n";
    for (const auto& row : result.rows) {
        errors << to_string(cfg.study_case) << ',' << row.n << ',' << row.replication + 1 << ','
               << to_string(row.status) << ',' << format_csv_double(row.l2_error) << '\n';
    }
    write_text_file(dir + "/errors.csv", errors.str());

    json config = study_config_to_json(cfg);
    json summary;
    summary["case"] = to_string(cfg.study_case);
    summary["c_mean"] = result.c_mean;
    summary["per_n"] = json::array();
    for (const auto& s : result.summary) {
        json e;
        e["n"] = s.n;
        e["p"] = s.p;
        e["n_ok"] = s.n_ok;
        e["n_failed"] = s.n_failed;
        e["q95"] = s.q95;
        e["c_n"] = s.c_n;
        e["e_n"] = s.e_n;
        summary["per_n"].push_back(e);
    }
    summary["config"] = config;
    summary["config_hash"] = hash_hex(canonical_json_hash(config));
    summary["seed"] = cfg.seed;
    write_text_file(dir + "/summary.json", summary.dump(2) + "\n");
    write_run_manifest(dir, config, cfg.seed, "study1", {"errors.csv", "summary.json"}, meta);
}

void write_study2_outputs(const std::string& dir, const StudyConfig& cfg,
                          const Study2Result& result, const RunMeta& meta) {
    std::filesystem::create_directories(dir);
    std::ostringstream cov;
    cov << "case,n,replication,status,theta_star,theta_hat,se,lower,upper,covered,standardized\n";
    for (const auto& row : result.rows) {
        cov << to_string(cfg.study_case) << ',' << row.n << ',' << row.replication + 1 << ','
            << to_string(row.status) << ',' << format_csv_double(row.theta_star) << ','
            << format_csv_double(row.theta_hat) << ',' << format_csv_double(row.se) << ','
            << format_csv_double(row.lower) << ',' << format_csv_double(row.upper) << ','
            << (std::isnan(row.se) ? "nan" : (row.covered ? "1" : "0")) << ','
            << format_csv_double(row.standardized) << '\n';
    }
    write_text_file(dir + "/coverage.csv", cov.str());

    std::ostringstream qq;
    qq << "n,theoretical,empirical\n";
    for (const auto& [n, points] : result.qq) {
        for (const auto& [theoretical, empirical] : points) {
            qq << n << ',' << format_csv_double(theoretical) << ',' << format_csv_double(empirical)
               << '\n';
        }
    }
    write_text_file(dir + "/qq.csv", qq.str());

    json config = study_config_to_json(cfg);
    json summary;
    summary["case"] = to_string(cfg.study_case);
    summary["alpha"] = cfg.alpha;
    summary["per_n"] = json::array();
    for (const auto& s : result.summary) {
        json e;
        e["n"] = s.n;
        e["p"] = s.p;
        e["n_ok"] = s.n_ok;
        e["n_failed"] = s.n_failed;
        e["coverage"] = s.coverage;
        e["coverage_se"] = s.coverage_se;
        summary["per_n"].push_back(e);
    }
    summary["config"] = config;
    summary["config_hash"] = hash_hex(canonical_json_hash(config));
    summary["seed"] = cfg.seed;
    write_text_file(dir + "/summary.json", summary.dump(2) + "\n");
    write_run_manifest(dir, config, cfg.seed, "study2", {"coverage.csv", "qq.csv", "summary.json"},
                       meta);
}

} // namespace ldrg
