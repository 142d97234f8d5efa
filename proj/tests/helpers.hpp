#pragma once

#include <memory>
#include <set>
#include <utility>
#include <vector>

#include "ldrg/block_partition.hpp"
#include "ldrg/local_graph.hpp"
#include "ldrg/model.hpp"
#include "ldrg/rng.hpp"

namespace test_helpers {

/// Consecutive blocks of the given sizes; node groups round-robin over m
/// inside each block when m > 0; block groups round-robin over l when l > 0.
inline std::shared_ptr<const ldrg::BlockPartition> make_partition(
    const std::vector<int>& block_sizes, int m = 0, int l = 0) {
    std::vector<int> block_of, group_of, block_group_of;
    for (std::size_t k = 0; k < block_sizes.size(); ++k) {
        for (int r = 0; r < block_sizes[k]; ++r) {
            block_of.push_back(static_cast<int>(k));
            if (m > 0) group_of.push_back(r % m);
        }
        if (l > 0) block_group_of.push_back(static_cast<int>(k) % l);
    }
    return std::make_shared<ldrg::BlockPartition>(
        ldrg::BlockPartition::build(block_of, group_of, block_group_of, m));
}

/// Edge set normalized to i < j, kept independent of LocalGraph internals.
using EdgeSet = std::set<std::pair<int, int>>;

inline EdgeSet edge_set_of(const ldrg::LocalGraph& g) {
    EdgeSet s;
    for (auto e : g.collect_edges()) s.insert(e);
    return s;
}

inline bool in_set(const EdgeSet& s, int i, int j) {
    if (i > j) std::swap(i, j);
    return s.count({i, j}) > 0;
}

/// Brute-force statistic oracle working from the edge set alone.
inline std::int64_t oracle_statistic(const ldrg::BlockPartition& part, const EdgeSet& edges,
                                     const ldrg::Term& t) {
    std::int64_t count = 0;
    auto transitive = [&](int i, int j) {
        int b = part.block_of(i);
        for (int h : part.block_members(b)) {
            if (h != i && h != j && in_set(edges, i, h) && in_set(edges, j, h)) return true;
        }
        return false;
    };
    for (auto [i, j] : edges) {
        int bi = part.block_of(i), bj = part.block_of(j);
        bool within = bi == bj;
        switch (t.kind) {
            case ldrg::TermKind::WithinEdgesTotal:
                count += within ? 1 : 0;
                break;
            case ldrg::TermKind::WithinEdgesPerBlock:
                count += (within && bi == t.a) ? 1 : 0;
                break;
            case ldrg::TermKind::WithinEdgesByNodeGroup:
                if (within) {
                    if (part.node_group_of(i) == t.a) ++count;
                    if (part.node_group_of(j) == t.a) ++count;
                }
                break;
            case ldrg::TermKind::WithinTransitiveEdgesTotal:
                count += (within && transitive(i, j)) ? 1 : 0;
                break;
            case ldrg::TermKind::WithinTransitiveEdgesByBlockGroup:
                count += (within && part.block_group_of(bi) == t.a && transitive(i, j)) ? 1 : 0;
                break;
            case ldrg::TermKind::BetweenEdgesTotal:
                count += within ? 0 : 1;
                break;
            case ldrg::TermKind::BetweenEdgesPerPair:
                count += (!within && std::min(bi, bj) == t.a && std::max(bi, bj) == t.b) ? 1 : 0;
                break;
        }
    }
    return count;
}

inline ldrg::StatVector oracle_statistics(const ldrg::BlockPartition& part, const EdgeSet& edges,
                                          const ldrg::ModelSpec& spec) {
    ldrg::StatVector out;
    for (const auto& t : spec.within_terms()) out.push_back(oracle_statistic(part, edges, t));
    for (const auto& t : spec.between_terms()) out.push_back(oracle_statistic(part, edges, t));
    return out;
}

/// Edges-plus-transitive-edges model over a within-only partition.
inline ldrg::ModelSpec edges_transitive_spec(std::shared_ptr<const ldrg::BlockPartition> part) {
    return ldrg::ModelSpec::build(std::move(part),
                                  {{ldrg::TermKind::WithinEdgesTotal},
                                   {ldrg::TermKind::WithinTransitiveEdgesTotal}},
                                  {});
}

/// Uniformly random pair of distinct nodes.
inline std::pair<int, int> random_pair(ldrg::Rng& rng, int n) {
    int i = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - 1)));
    if (j >= i) ++j;
    return {i, j};
}

/// Bernoulli(prob) graph, edge set mirrored for the oracle.
inline EdgeSet randomize_graph(ldrg::LocalGraph& g, ldrg::Rng& rng, double prob) {
    g.clear();
    EdgeSet edges;
    int n = g.partition().n_nodes();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng.next_double() < prob) {
                g.toggle_edge(i, j);
                edges.insert({i, j});
            }
        }
    }
    return edges;
}

} // namespace test_helpers
