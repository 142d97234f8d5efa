#include "ldrg/block_partition.hpp"

#include <algorithm>
#include <string>

namespace ldrg {

BlockPartition BlockPartition::build(const std::vector<int>& block_of,
                                     const std::vector<int>& node_group_of,
                                     const std::vector<int>& block_group_of,
                                     int min_node_groups) {
    if (block_of.empty()) throw DataError("partition: no nodes");
    int k_max = -1;
    for (std::size_t i = 0; i < block_of.size(); ++i) {
        if (block_of[i] < 0) {
            throw DataError("partition: node " + std::to_string(i + 1) +
                            " has negative block index");
        }
        k_max = std::max(k_max, block_of[i]);
    }
    int n_blocks = k_max + 1;

    BlockPartition p;
    p.node_block_ = block_of;
    p.blocks_.resize(n_blocks);
    for (std::size_t i = 0; i < block_of.size(); ++i) {
        p.blocks_[block_of[i]].push_back(static_cast<int>(i));
    }
    for (int k = 0; k < n_blocks; ++k) {
        if (p.blocks_[k].empty()) {
            throw DataError("partition: block " + std::to_string(k + 1) + " is empty");
        }
    }
    p.node_rank_.resize(block_of.size());
    for (int k = 0; k < n_blocks; ++k) {
        for (std::size_t r = 0; r < p.blocks_[k].size(); ++r) {
            p.node_rank_[p.blocks_[k][r]] = static_cast<int>(r);
        }
    }

    if (!node_group_of.empty()) {
        if (node_group_of.size() != block_of.size()) {
            throw DataError("partition: node group list length does not match node count");
        }
        int m_max = -1;
        for (std::size_t i = 0; i < node_group_of.size(); ++i) {
            if (node_group_of[i] < 0) {
                throw DataError("partition: node " + std::to_string(i + 1) +
                                " has negative group index");
            }
            m_max = std::max(m_max, node_group_of[i]);
        }
        p.node_group_ = node_group_of;
        p.n_node_groups_ = std::max(m_max + 1, min_node_groups);
    }

    if (!block_group_of.empty()) {
        if (static_cast<int>(block_group_of.size()) != n_blocks) {
            throw DataError("partition: block group list length does not match block count");
        }
        int l_max = -1;
        for (int g : block_group_of) {
            if (g < 0) throw DataError("partition: negative block group index");
            l_max = std::max(l_max, g);
        }
        p.block_group_ = block_group_of;
        p.n_block_groups_ = l_max + 1;
    }
    return p;
}

std::int64_t BlockPartition::n_within_pairs() const {
    std::int64_t total = 0;
    for (const auto& b : blocks_) total += pairs_of(static_cast<std::int64_t>(b.size()));
    return total;
}

std::int64_t BlockPartition::n_between_pairs() const {
    std::int64_t total = 0;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        for (std::size_t l = k + 1; l < blocks_.size(); ++l) {
            total += static_cast<std::int64_t>(blocks_[k].size()) *
                     static_cast<std::int64_t>(blocks_[l].size());
        }
    }
    return total;
}

double BlockPartition::average_block_size() const {
    return static_cast<double>(n_nodes()) / static_cast<double>(n_blocks());
}

int BlockPartition::max_block_size() const {
    int m = 0;
    for (const auto& b : blocks_) m = std::max(m, static_cast<int>(b.size()));
    return m;
}

int BlockPartition::subgraph_index(SubgraphRef ref) const {
    int kk = n_blocks();
    if (ref.k < 0 || ref.l < ref.k || ref.l >= kk) {
        throw DataError("subgraph_index: invalid subgraph reference");
    }
    if (ref.within()) return ref.k;
    // Lexicographic rank of (k, l), k < l.
    int rank = ref.k * kk - ref.k * (ref.k + 1) / 2 + (ref.l - ref.k - 1);
    return kk + rank;
}

SubgraphRef BlockPartition::subgraph_at(int index) const {
    int kk = n_blocks();
    if (index < 0 || index >= n_subgraphs()) {
        throw DataError("subgraph_at: index out of range");
    }
    if (index < kk) return {index, index};
    int rank = index - kk;
    for (int k = 0; k < kk; ++k) {
        int row = kk - k - 1;
        if (rank < row) return {k, k + 1 + rank};
        rank -= row;
    }
    throw DataError("subgraph_at: unreachable");
}

} // namespace ldrg
