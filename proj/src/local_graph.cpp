#include "ldrg/local_graph.hpp"

#include <algorithm>
#include <bit>
#include <string>

namespace ldrg {

namespace {

std::size_t word_count(std::int64_t bits) {
    return static_cast<std::size_t>((bits + 63) / 64);
}

} // namespace

LocalGraph::LocalGraph(std::shared_ptr<const BlockPartition> partition)
    : part_(std::move(partition)) {
    int kk = part_->n_blocks();
    within_.resize(kk);
    for (int k = 0; k < kk; ++k) {
        auto& b = within_[k];
        b.size = part_->block_size(k);
        b.row_words = static_cast<int>(word_count(b.size));
        b.edges.assign(word_count(pairs_of(b.size)), 0);
        b.adj.assign(static_cast<std::size_t>(b.size) * b.row_words, 0);
        b.cn.assign(static_cast<std::size_t>(pairs_of(b.size)), 0);
    }
    between_.resize(static_cast<std::size_t>(kk) * (kk - 1) / 2);
    for (int k = 0; k < kk; ++k) {
        for (int l = k + 1; l < kk; ++l) {
            auto& p = between_[pair_rank(k, l)];
            p.rows = part_->block_size(k);
            p.cols = part_->block_size(l);
            p.edges.assign(word_count(static_cast<std::int64_t>(p.rows) * p.cols), 0);
        }
    }
}

int LocalGraph::pair_rank(int k, int l) const {
    int kk = part_->n_blocks();
    return k * kk - k * (k + 1) / 2 + (l - k - 1);
}

void LocalGraph::check_distinct(int i, int j) const {
    if (i == j) throw DataError("edge endpoints coincide: node " + std::to_string(i + 1));
    if (i < 0 || j < 0 || i >= part_->n_nodes() || j >= part_->n_nodes()) {
        throw DataError("edge endpoint out of range");
    }
}

SubgraphRef LocalGraph::container_of(int i, int j) const {
    check_distinct(i, j);
    int k = part_->block_of(i);
    int l = part_->block_of(j);
    if (k > l) std::swap(k, l);
    return {k, l};
}

bool LocalGraph::toggle_edge(int i, int j) {
    check_distinct(i, j);
    int bi = part_->block_of(i);
    int bj = part_->block_of(j);
    if (bi == bj) {
        auto& b = within_[bi];
        int r = part_->rank_of(i);
        int s = part_->rank_of(j);
        if (r > s) std::swap(r, s);
        std::int64_t idx = pair_index(b.size, r, s);
        bool adding = !test_bit(b.edges, idx);
        int d = adding ? 1 : -1;
        // Shared partners of (i, h) shift for every h adjacent to j, and
        // symmetrically; rows are scanned before the flip, so when removing
        // the still-present partner bits r/s are masked out explicitly.
        const std::uint64_t* row_r = adj_row(b, r);
        const std::uint64_t* row_s = adj_row(b, s);
        for (int w = 0; w < b.row_words; ++w) {
            std::uint64_t bits = row_s[w];
            while (bits) {
                int h = w * 64 + std::countr_zero(bits);
                bits &= bits - 1;
                if (h == r) continue;
                int lo = std::min(r, h), hi = std::max(r, h);
                b.cn[static_cast<std::size_t>(pair_index(b.size, lo, hi))] =
                    static_cast<std::uint16_t>(
                        b.cn[static_cast<std::size_t>(pair_index(b.size, lo, hi))] + d);
            }
        }
        for (int w = 0; w < b.row_words; ++w) {
            std::uint64_t bits = row_r[w];
            while (bits) {
                int h = w * 64 + std::countr_zero(bits);
                bits &= bits - 1;
                if (h == s) continue;
                int lo = std::min(s, h), hi = std::max(s, h);
                b.cn[static_cast<std::size_t>(pair_index(b.size, lo, hi))] =
                    static_cast<std::uint16_t>(
                        b.cn[static_cast<std::size_t>(pair_index(b.size, lo, hi))] + d);
            }
        }
        flip_bit(b.edges, idx);
        b.adj[static_cast<std::size_t>(r) * b.row_words + (s >> 6)] ^= 1ULL << (s & 63);
        b.adj[static_cast<std::size_t>(s) * b.row_words + (r >> 6)] ^= 1ULL << (r & 63);
        b.n_edges += d;
        n_edges_ += d;
        return adding;
    }
    if (bi > bj) { std::swap(bi, bj); std::swap(i, j); }
    auto& p = between_[pair_rank(bi, bj)];
    std::int64_t idx =
        static_cast<std::int64_t>(part_->rank_of(i)) * p.cols + part_->rank_of(j);
    bool adding = !test_bit(p.edges, idx);
    flip_bit(p.edges, idx);
    p.n_edges += adding ? 1 : -1;
    n_edges_ += adding ? 1 : -1;
    return adding;
}

bool LocalGraph::has_edge(int i, int j) const {
    check_distinct(i, j);
    int bi = part_->block_of(i);
    int bj = part_->block_of(j);
    if (bi == bj) {
        const auto& b = within_[bi];
        int r = part_->rank_of(i);
        int s = part_->rank_of(j);
        if (r > s) std::swap(r, s);
        return test_bit(b.edges, pair_index(b.size, r, s));
    }
    if (bi > bj) { std::swap(bi, bj); std::swap(i, j); }
    const auto& p = between_[pair_rank(bi, bj)];
    return test_bit(p.edges,
                    static_cast<std::int64_t>(part_->rank_of(i)) * p.cols + part_->rank_of(j));
}

std::int64_t LocalGraph::common_within_neighbors(int i, int j) const {
    check_distinct(i, j);
    int bi = part_->block_of(i);
    int bj = part_->block_of(j);
    if (bi != bj) {
        throw DataError("common_within_neighbors: nodes " + std::to_string(i + 1) + " and " +
                        std::to_string(j + 1) + " are in different blocks");
    }
    const auto& b = within_[bi];
    const std::uint64_t* row_i = adj_row(b, part_->rank_of(i));
    const std::uint64_t* row_j = adj_row(b, part_->rank_of(j));
    std::int64_t count = 0;
    for (int w = 0; w < b.row_words; ++w) count += std::popcount(row_i[w] & row_j[w]);
    return count;
}

std::int64_t LocalGraph::stored_shared_partners(int i, int j) const {
    check_distinct(i, j);
    int bi = part_->block_of(i);
    if (bi != part_->block_of(j)) throw DataError("stored_shared_partners: nodes in different blocks");
    const auto& b = within_[bi];
    int r = part_->rank_of(i);
    int s = part_->rank_of(j);
    if (r > s) std::swap(r, s);
    return b.cn[static_cast<std::size_t>(pair_index(b.size, r, s))];
}

std::int64_t LocalGraph::between_edge_count(int k, int l) const {
    if (k > l) std::swap(k, l);
    return between_[pair_rank(k, l)].n_edges;
}

std::int64_t LocalGraph::n_vars(SubgraphRef ref) const {
    if (ref.within()) return pairs_of(part_->block_size(ref.k));
    return static_cast<std::int64_t>(part_->block_size(ref.k)) * part_->block_size(ref.l);
}

std::pair<int, int> LocalGraph::var_nodes(SubgraphRef ref, std::int64_t var) const {
    if (var < 0 || var >= n_vars(ref)) throw DataError("var_nodes: variable index out of range");
    if (ref.within()) {
        const auto& members = part_->block_members(ref.k);
        int a = static_cast<int>(members.size());
        int r = 0;
        std::int64_t offset = var;
        while (offset >= a - 1 - r) {
            offset -= a - 1 - r;
            ++r;
        }
        int s = r + 1 + static_cast<int>(offset);
        return {members[r], members[s]};
    }
    const auto& mk = part_->block_members(ref.k);
    const auto& ml = part_->block_members(ref.l);
    int cols = static_cast<int>(ml.size());
    return {mk[static_cast<std::size_t>(var / cols)], ml[static_cast<std::size_t>(var % cols)]};
}

bool LocalGraph::get_var(SubgraphRef ref, std::int64_t var) const {
    if (var < 0 || var >= n_vars(ref)) throw DataError("get_var: variable index out of range");
    if (ref.within()) return test_bit(within_[ref.k].edges, var);
    return test_bit(between_[pair_rank(ref.k, ref.l)].edges, var);
}

std::uint64_t LocalGraph::state_mask(SubgraphRef ref) const {
    std::int64_t d = n_vars(ref);
    if (d > 64) throw DataError("state_mask: subgraph has more than 64 edge variables");
    const auto& bits = ref.within() ? within_[ref.k].edges : between_[pair_rank(ref.k, ref.l)].edges;
    if (bits.empty()) return 0;
    std::uint64_t mask = bits[0];
    if (d < 64) mask &= (1ULL << d) - 1;
    return mask;
}

void LocalGraph::clear_subgraph(SubgraphRef ref) {
    // Clears by toggling present edges so every counter stays consistent.
    std::int64_t d = n_vars(ref);
    for (std::int64_t v = 0; v < d; ++v) {
        if (get_var(ref, v)) {
            auto [i, j] = var_nodes(ref, v);
            toggle_edge(i, j);
        }
    }
}

void LocalGraph::clear() {
    *this = LocalGraph(part_);
}

std::vector<std::pair<int, int>> LocalGraph::collect_edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>(n_edges_));
    int kk = part_->n_blocks();
    for (int k = 0; k < kk; ++k) {
        for_each_within_edge(k, [&](int i, int j) { out.emplace_back(i, j); });
    }
    for (int k = 0; k < kk; ++k) {
        for (int l = k + 1; l < kk; ++l) {
            const auto& p = between_[pair_rank(k, l)];
            const auto& mk = part_->block_members(k);
            const auto& ml = part_->block_members(l);
            std::int64_t idx = 0;
            for (int r = 0; r < p.rows; ++r) {
                for (int c = 0; c < p.cols; ++c, ++idx) {
                    if (test_bit(p.edges, idx)) {
                        int i = mk[r], j = ml[c];
                        out.emplace_back(std::min(i, j), std::max(i, j));
                    }
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::int64_t LocalGraph::within_transitive_delta(int i, int j) const {
    check_distinct(i, j);
    int bi = part_->block_of(i);
    if (bi != part_->block_of(j)) {
        throw DataError("within_transitive_delta: nodes in different blocks");
    }
    const auto& b = within_[bi];
    int r = part_->rank_of(i);
    int s = part_->rank_of(j);
    if (r > s) std::swap(r, s);
    std::int64_t idx = pair_index(b.size, r, s);
    bool adding = !test_bit(b.edges, idx);
    std::int64_t cn_rs = b.cn[static_cast<std::size_t>(idx)];

    // Edges (i, h) and (j, h) with h a common neighbor gain or lose their
    // only shared partner exactly at counter values 0 (adding) or 1
    // (removing); the toggled edge itself counts when cn(i, j) >= 1.
    std::int64_t delta = cn_rs >= 1 ? 1 : 0;
    const std::uint64_t* row_r = adj_row(b, r);
    const std::uint64_t* row_s = adj_row(b, s);
    std::uint16_t boundary = adding ? 0 : 1;
    for (int w = 0; w < b.row_words; ++w) {
        std::uint64_t bits = row_r[w] & row_s[w];
        while (bits) {
            int h = w * 64 + std::countr_zero(bits);
            bits &= bits - 1;
            int lo = std::min(r, h), hi = std::max(r, h);
            if (b.cn[static_cast<std::size_t>(pair_index(b.size, lo, hi))] == boundary) ++delta;
            lo = std::min(s, h);
            hi = std::max(s, h);
            if (b.cn[static_cast<std::size_t>(pair_index(b.size, lo, hi))] == boundary) ++delta;
        }
    }
    return adding ? delta : -delta;
}

std::int64_t LocalGraph::within_transitive_count(int k) const {
    const auto& b = within_[k];
    std::int64_t count = 0;
    std::int64_t idx = 0;
    for (int r = 0; r < b.size; ++r) {
        const std::uint64_t* row_r = adj_row(b, r);
        for (int s = r + 1; s < b.size; ++s, ++idx) {
            if (!test_bit(b.edges, idx)) continue;
            const std::uint64_t* row_s = adj_row(b, s);
            for (int w = 0; w < b.row_words; ++w) {
                if (row_r[w] & row_s[w]) {
                    ++count;
                    break;
                }
            }
        }
    }
    return count;
}

bool LocalGraph::operator==(const LocalGraph& other) const {
    if (part_->n_nodes() != other.part_->n_nodes()) return false;
    for (std::size_t k = 0; k < within_.size(); ++k) {
        if (within_[k].edges != other.within_[k].edges) return false;
    }
    for (std::size_t r = 0; r < between_.size(); ++r) {
        if (between_[r].edges != other.between_[r].edges) return false;
    }
    return true;
}

} // namespace ldrg
