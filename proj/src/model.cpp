#include "ldrg/model.hpp"

#include <algorithm>
#include <cmath>

namespace ldrg {

namespace {

std::string ordinal_name(const char* base, int idx) {
    return std::string(base) + "_" + std::to_string(idx + 1);
}

} // namespace

std::string Term::name() const {
    switch (kind) {
        case TermKind::WithinEdgesTotal: return "within_edges";
        case TermKind::WithinEdgesPerBlock: return ordinal_name("within_edges_block", a);
        case TermKind::WithinEdgesByNodeGroup: return ordinal_name("within_edges_group", a);
        case TermKind::WithinTransitiveEdgesTotal: return "within_transitive_edges";
        case TermKind::WithinTransitiveEdgesByBlockGroup:
            return ordinal_name("within_transitive_edges_blockgroup", a);
        case TermKind::BetweenEdgesTotal: return "between_edges";
        case TermKind::BetweenEdgesPerPair:
            return ordinal_name("between_edges_pair", a) + "_" + std::to_string(b + 1);
    }
    return "unknown";
}

void check_finite(const ParamVector& theta, const char* where) {
    for (int j = 0; j < theta.within.size(); ++j) {
        if (!std::isfinite(theta.within[j])) {
            throw DataError(std::string(where) + ": within parameter " + std::to_string(j + 1) +
                            " is not finite");
        }
    }
    for (int j = 0; j < theta.between.size(); ++j) {
        if (!std::isfinite(theta.between[j])) {
            throw DataError(std::string(where) + ": between parameter " + std::to_string(j + 1) +
                            " is not finite");
        }
    }
}

ModelSpec ModelSpec::build(std::shared_ptr<const BlockPartition> partition,
                           std::vector<Term> within_terms,
                           std::vector<Term> between_terms) {
    if (within_terms.empty() && between_terms.empty()) {
        throw DataError("model: no terms");
    }
    const auto& part = *partition;
    auto validate = [&](const Term& t, bool expect_within, int pos) {
        std::string where = (expect_within ? "within[" : "between[") + std::to_string(pos) + "]";
        if (t.within() != expect_within) {
            throw DataError("model: " + where + ": term " + t.name() +
                            (expect_within ? " is not a within-block term" : " is not a between-block term"));
        }
        switch (t.kind) {
            case TermKind::WithinEdgesPerBlock:
                if (t.a < 0 || t.a >= part.n_blocks()) {
                    throw DataError("model: " + where + ": block " + std::to_string(t.a + 1) +
                                    " does not exist");
                }
                break;
            case TermKind::WithinEdgesByNodeGroup:
                if (!part.has_node_groups()) {
                    throw DataError("model: " + where + ": partition has no node groups");
                }
                if (t.a < 0 || t.a >= part.n_node_groups()) {
                    throw DataError("model: " + where + ": node group " + std::to_string(t.a + 1) +
                                    " does not exist");
                }
                break;
            case TermKind::WithinTransitiveEdgesByBlockGroup:
                if (!part.has_block_groups()) {
                    throw DataError("model: " + where + ": partition has no block groups");
                }
                if (t.a < 0 || t.a >= part.n_block_groups()) {
                    throw DataError("model: " + where + ": block group " + std::to_string(t.a + 1) +
                                    " does not exist");
                }
                break;
            case TermKind::BetweenEdgesPerPair:
                if (t.a < 0 || t.b <= t.a || t.b >= part.n_blocks()) {
                    throw DataError("model: " + where + ": block pair (" + std::to_string(t.a + 1) +
                                    ", " + std::to_string(t.b + 1) + ") is not a valid pair");
                }
                break;
            default:
                break;
        }
    };
    for (std::size_t i = 0; i < within_terms.size(); ++i) {
        validate(within_terms[i], true, static_cast<int>(i));
        for (std::size_t j = 0; j < i; ++j) {
            if (within_terms[j] == within_terms[i]) {
                throw DataError("model: duplicate term " + within_terms[i].name());
            }
        }
    }
    for (std::size_t i = 0; i < between_terms.size(); ++i) {
        validate(between_terms[i], false, static_cast<int>(i));
        for (std::size_t j = 0; j < i; ++j) {
            if (between_terms[j] == between_terms[i]) {
                throw DataError("model: duplicate term " + between_terms[i].name());
            }
        }
    }

    ModelSpec spec;
    spec.part_ = std::move(partition);
    spec.within_ = std::move(within_terms);
    spec.between_ = std::move(between_terms);
    for (const auto& t : spec.within_) {
        if (t.kind == TermKind::WithinTransitiveEdgesTotal ||
            t.kind == TermKind::WithinTransitiveEdgesByBlockGroup) {
            spec.needs_transitive_ = true;
        }
        if (t.kind == TermKind::WithinEdgesByNodeGroup) spec.needs_node_groups_ = true;
    }
    return spec;
}

std::vector<std::string> ModelSpec::term_names() const {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(dim()));
    for (const auto& t : within_) names.push_back(t.name());
    for (const auto& t : between_) names.push_back(t.name());
    return names;
}

void within_stats_slice(const LocalGraph& g, const ModelSpec& spec, int k, std::int64_t* out) {
    const auto& part = spec.partition();
    std::int64_t edges = g.within_edge_count(k);
    std::int64_t trans = 0;
    if (spec.needs_transitive()) trans = g.within_transitive_count(k);
    std::vector<std::int64_t> group_ends;
    if (spec.needs_node_groups()) {
        group_ends.assign(static_cast<std::size_t>(part.n_node_groups()), 0);
        g.for_each_within_edge(k, [&](int i, int j) {
            ++group_ends[static_cast<std::size_t>(part.node_group_of(i))];
            ++group_ends[static_cast<std::size_t>(part.node_group_of(j))];
        });
    }
    const auto& terms = spec.within_terms();
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const Term& term = terms[t];
        std::int64_t v = 0;
        switch (term.kind) {
            case TermKind::WithinEdgesTotal: v = edges; break;
            case TermKind::WithinEdgesPerBlock: v = (term.a == k) ? edges : 0; break;
            case TermKind::WithinEdgesByNodeGroup:
                v = group_ends[static_cast<std::size_t>(term.a)];
                break;
            case TermKind::WithinTransitiveEdgesTotal: v = trans; break;
            case TermKind::WithinTransitiveEdgesByBlockGroup:
                v = (part.block_group_of(k) == term.a) ? trans : 0;
                break;
            default: break;
        }
        out[t] = v;
    }
}

void within_change_slice(const LocalGraph& g, const ModelSpec& spec, int i, int j,
                         std::int64_t* out) {
    const auto& part = spec.partition();
    int k = part.block_of(i);
    std::int64_t sign = g.has_edge(i, j) ? -1 : 1;
    std::int64_t dtrans = 0;
    bool have_dtrans = false;
    const auto& terms = spec.within_terms();
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const Term& term = terms[t];
        std::int64_t v = 0;
        switch (term.kind) {
            case TermKind::WithinEdgesTotal: v = sign; break;
            case TermKind::WithinEdgesPerBlock: v = (term.a == k) ? sign : 0; break;
            case TermKind::WithinEdgesByNodeGroup:
                v = sign * ((part.node_group_of(i) == term.a ? 1 : 0) +
                            (part.node_group_of(j) == term.a ? 1 : 0));
                break;
            case TermKind::WithinTransitiveEdgesTotal:
            case TermKind::WithinTransitiveEdgesByBlockGroup: {
                bool in_scope = term.kind == TermKind::WithinTransitiveEdgesTotal ||
                                part.block_group_of(k) == term.a;
                if (in_scope) {
                    if (!have_dtrans) {
                        dtrans = g.within_transitive_delta(i, j);
                        have_dtrans = true;
                    }
                    v = dtrans;
                }
                break;
            }
            default: break;
        }
        out[t] = v;
    }
}

void between_stats_slice(const LocalGraph& g, const ModelSpec& spec, int k, int l,
                         std::int64_t* out) {
    std::int64_t edges = g.between_edge_count(k, l);
    const auto& terms = spec.between_terms();
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const Term& term = terms[t];
        std::int64_t v = 0;
        switch (term.kind) {
            case TermKind::BetweenEdgesTotal: v = edges; break;
            case TermKind::BetweenEdgesPerPair: v = (term.a == k && term.b == l) ? edges : 0; break;
            default: break;
        }
        out[t] = v;
    }
}

void between_change_slice(const LocalGraph& g, const ModelSpec& spec, int i, int j,
                          std::int64_t* out) {
    const auto& part = spec.partition();
    int k = part.block_of(i);
    int l = part.block_of(j);
    if (k > l) std::swap(k, l);
    std::int64_t sign = g.has_edge(i, j) ? -1 : 1;
    const auto& terms = spec.between_terms();
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const Term& term = terms[t];
        std::int64_t v = 0;
        switch (term.kind) {
            case TermKind::BetweenEdgesTotal: v = sign; break;
            case TermKind::BetweenEdgesPerPair: v = (term.a == k && term.b == l) ? sign : 0; break;
            default: break;
        }
        out[t] = v;
    }
}

StatVector compute_statistics(const LocalGraph& g, const ModelSpec& spec) {
    const auto& part = spec.partition();
    StatVector out(static_cast<std::size_t>(spec.dim()), 0);
    std::vector<std::int64_t> buf(static_cast<std::size_t>(std::max(spec.p(), spec.q())), 0);
    for (int k = 0; k < part.n_blocks(); ++k) {
        if (spec.p() == 0) break;
        within_stats_slice(g, spec, k, buf.data());
        for (int t = 0; t < spec.p(); ++t) out[static_cast<std::size_t>(t)] += buf[static_cast<std::size_t>(t)];
    }
    if (spec.q() > 0) {
        for (int k = 0; k < part.n_blocks(); ++k) {
            for (int l = k + 1; l < part.n_blocks(); ++l) {
                between_stats_slice(g, spec, k, l, buf.data());
                for (int t = 0; t < spec.q(); ++t) {
                    out[static_cast<std::size_t>(spec.p() + t)] += buf[static_cast<std::size_t>(t)];
                }
            }
        }
    }
    return out;
}

StatVector subgraph_statistics(const LocalGraph& g, const ModelSpec& spec, SubgraphRef ref) {
    StatVector out(static_cast<std::size_t>(spec.dim()), 0);
    if (ref.within()) {
        if (spec.p() > 0) within_stats_slice(g, spec, ref.k, out.data());
    } else if (spec.q() > 0) {
        between_stats_slice(g, spec, ref.k, ref.l, out.data() + spec.p());
    }
    return out;
}

StatVector change_statistics(const LocalGraph& g, const ModelSpec& spec, int i, int j) {
    StatVector out(static_cast<std::size_t>(spec.dim()), 0);
    SubgraphRef ref = g.container_of(i, j);
    if (ref.within()) {
        if (spec.p() > 0) within_change_slice(g, spec, i, j, out.data());
    } else if (spec.q() > 0) {
        between_change_slice(g, spec, i, j, out.data() + spec.p());
    }
    return out;
}

void statistic_range(const ModelSpec& spec, StatVector& lo, StatVector& hi) {
    const auto& part = spec.partition();
    lo.assign(static_cast<std::size_t>(spec.dim()), 0);
    hi.assign(static_cast<std::size_t>(spec.dim()), 0);
    auto transitive_cap = [&](int k) {
        std::int64_t a = part.block_size(k);
        return a >= 3 ? pairs_of(a) : 0;
    };
    int slot = 0;
    for (const auto& term : spec.within_terms()) {
        std::int64_t top = 0;
        switch (term.kind) {
            case TermKind::WithinEdgesTotal: top = part.n_within_pairs(); break;
            case TermKind::WithinEdgesPerBlock: top = pairs_of(part.block_size(term.a)); break;
            case TermKind::WithinEdgesByNodeGroup:
                for (int k = 0; k < part.n_blocks(); ++k) {
                    std::int64_t a = part.block_size(k);
                    for (int node : part.block_members(k)) {
                        if (part.node_group_of(node) == term.a) top += a - 1;
                    }
                }
                break;
            case TermKind::WithinTransitiveEdgesTotal:
                for (int k = 0; k < part.n_blocks(); ++k) top += transitive_cap(k);
                break;
            case TermKind::WithinTransitiveEdgesByBlockGroup:
                for (int k = 0; k < part.n_blocks(); ++k) {
                    if (part.block_group_of(k) == term.a) top += transitive_cap(k);
                }
                break;
            default: break;
        }
        hi[static_cast<std::size_t>(slot++)] = top;
    }
    for (const auto& term : spec.between_terms()) {
        std::int64_t top = 0;
        switch (term.kind) {
            case TermKind::BetweenEdgesTotal: top = part.n_between_pairs(); break;
            case TermKind::BetweenEdgesPerPair:
                top = static_cast<std::int64_t>(part.block_size(term.a)) * part.block_size(term.b);
                break;
            default: break;
        }
        hi[static_cast<std::size_t>(slot++)] = top;
    }
}

} // namespace ldrg
