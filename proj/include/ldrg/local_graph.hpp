#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "ldrg/block_partition.hpp"
#include "ldrg/common.hpp"

namespace ldrg {

/// Block-partitioned undirected graph stored as one container per local
/// subgraph: a bitset over the C(a_k, 2) within-block pairs of each block
/// plus a bitset over the a_k * a_l pairs of each block pair. Within blocks
/// an adjacency-row bitset and a shared-partner counter per pair are kept in
/// sync so transitivity change statistics cost O(a_k) per toggle.
class LocalGraph {
public:
    explicit LocalGraph(std::shared_ptr<const BlockPartition> partition);

    const BlockPartition& partition() const { return *part_; }
    std::shared_ptr<const BlockPartition> partition_ptr() const { return part_; }

    /// Flips the edge state of {i, j} and returns the new value.
    /// Self-loops are rejected.
    bool toggle_edge(int i, int j);
    bool has_edge(int i, int j) const;

    /// The unique subgraph whose variable set contains the pair {i, j}.
    SubgraphRef container_of(int i, int j) const;

    /// Number of nodes adjacent to both i and j inside their shared block.
    /// Nodes in different blocks are rejected.
    std::int64_t common_within_neighbors(int i, int j) const;

    std::int64_t n_edges() const { return n_edges_; }
    std::int64_t within_edge_count(int k) const { return within_[k].n_edges; }
    std::int64_t between_edge_count(int k, int l) const;

    /// Number of edge variables (dyads) of one subgraph.
    std::int64_t n_vars(SubgraphRef ref) const;
    /// Global node pair of a subgraph's edge variable, in subgraph-local
    /// variable order (lexicographic over local ranks).
    std::pair<int, int> var_nodes(SubgraphRef ref, std::int64_t var) const;
    bool get_var(SubgraphRef ref, std::int64_t var) const;

    /// Packs a small subgraph's state into a bitmask (requires n_vars <= 64).
    std::uint64_t state_mask(SubgraphRef ref) const;

    void clear_subgraph(SubgraphRef ref);
    void clear();

    /// All edges, ascending (i, j) with i < j.
    std::vector<std::pair<int, int>> collect_edges() const;

    /// Change in the block's transitive-edge count if {i, j} were toggled
    /// now; both nodes must share a block. Does not modify the graph.
    std::int64_t within_transitive_delta(int i, int j) const;

    /// Transitive-edge count of block k recomputed from adjacency rows
    /// (does not consult the shared-partner counters).
    std::int64_t within_transitive_count(int k) const;

    /// Per-edge visitor over within-block edges of block k: f(i, j) with
    /// global ids, i < j.
    template <typename F>
    void for_each_within_edge(int k, F&& f) const {
        const auto& b = within_[k];
        const auto& members = part_->block_members(k);
        std::int64_t idx = 0;
        for (int r = 0; r < b.size; ++r) {
            for (int s = r + 1; s < b.size; ++s, ++idx) {
                if (test_bit(b.edges, idx)) f(members[r], members[s]);
            }
        }
    }

    bool operator==(const LocalGraph& other) const;

    /// Shared-partner counter as maintained incrementally; tests compare it
    /// against common_within_neighbors. Nodes must share a block.
    std::int64_t stored_shared_partners(int i, int j) const;

private:
    struct WithinBlock {
        int size = 0;
        int row_words = 0;
        std::vector<std::uint64_t> edges; // C(size, 2) bits
        std::vector<std::uint64_t> adj;   // size rows of row_words words
        std::vector<std::uint16_t> cn;    // shared partners per pair
        std::int64_t n_edges = 0;
    };
    struct BetweenPair {
        int rows = 0; // |A_k|
        int cols = 0; // |A_l|
        std::vector<std::uint64_t> edges; // rows * cols bits
        std::int64_t n_edges = 0;
    };

    static bool test_bit(const std::vector<std::uint64_t>& bits, std::int64_t idx) {
        return (bits[static_cast<std::size_t>(idx >> 6)] >> (idx & 63)) & 1u;
    }
    static void flip_bit(std::vector<std::uint64_t>& bits, std::int64_t idx) {
        bits[static_cast<std::size_t>(idx >> 6)] ^= (1ULL << (idx & 63));
    }

    static std::int64_t pair_index(int a, int r, int s) {
        // r < s, lexicographic over rows of shrinking length.
        return static_cast<std::int64_t>(r) * (2 * a - r - 1) / 2 + (s - r - 1);
    }

    const std::uint64_t* adj_row(const WithinBlock& b, int r) const {
        return b.adj.data() + static_cast<std::size_t>(r) * b.row_words;
    }

    int pair_rank(int k, int l) const; // k < l
    void check_distinct(int i, int j) const;

    std::shared_ptr<const BlockPartition> part_;
    std::vector<WithinBlock> within_;
    std::vector<BetweenPair> between_;
    std::int64_t n_edges_ = 0;
};

} // namespace ldrg
