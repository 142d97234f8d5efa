#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "ldrg/common.hpp"

namespace ldrg {

/// Identifies one local subgraph: within block k when k == l, between the
/// ordered pair (k, l) with k < l otherwise. Block indices are 0-based
/// internally; external files and configs use 1-based labels.
struct SubgraphRef {
    int k = 0;
    int l = 0;

    bool within() const { return k == l; }
    bool operator==(const SubgraphRef&) const = default;
};

/// Node partition into K non-overlapping blocks covering {0, ..., n-1},
/// with optional node groups (exogenous categories shared across blocks)
/// and optional block groups (categories of whole blocks).
class BlockPartition {
public:
    /// block_of[i] in [0, K) for every node i; K inferred as max + 1.
    /// Every block must be non-empty. Group universes are inferred as
    /// max + 1 but can be forced larger via min_node_groups (labels beyond
    /// the observed ones denote groups with no members).
    static BlockPartition build(const std::vector<int>& block_of,
                                const std::vector<int>& node_group_of = {},
                                const std::vector<int>& block_group_of = {},
                                int min_node_groups = 0);

    int n_nodes() const { return static_cast<int>(node_block_.size()); }
    int n_blocks() const { return static_cast<int>(blocks_.size()); }
    int n_node_groups() const { return n_node_groups_; }
    int n_block_groups() const { return n_block_groups_; }

    int block_of(int node) const { return node_block_[node]; }
    /// Position of the node inside its block (nodes sorted ascending).
    int rank_of(int node) const { return node_rank_[node]; }
    const std::vector<int>& block_members(int k) const { return blocks_[k]; }
    int block_size(int k) const { return static_cast<int>(blocks_[k].size()); }

    bool has_node_groups() const { return n_node_groups_ > 0; }
    int node_group_of(int node) const { return node_group_[node]; }
    bool has_block_groups() const { return n_block_groups_ > 0; }
    int block_group_of(int k) const { return block_group_[k]; }

    /// Number of within-block edge variables summed over blocks plus
    /// between-block variables summed over pairs.
    std::int64_t n_within_pairs() const;
    std::int64_t n_between_pairs() const;

    double average_block_size() const;
    int max_block_size() const;

    int n_subgraphs() const {
        int k = n_blocks();
        return k + k * (k - 1) / 2;
    }

    /// Linear subgraph numbering: within k -> k, between (k, l) ->
    /// K + lexicographic rank of the pair. Stable under model choice, so
    /// RNG streams attached to it do not move when terms are added.
    int subgraph_index(SubgraphRef ref) const;
    SubgraphRef subgraph_at(int index) const;

private:
    std::vector<std::vector<int>> blocks_;
    std::vector<int> node_block_;
    std::vector<int> node_rank_;
    std::vector<int> node_group_;
    std::vector<int> block_group_;
    int n_node_groups_ = 0;
    int n_block_groups_ = 0;
};

} // namespace ldrg
