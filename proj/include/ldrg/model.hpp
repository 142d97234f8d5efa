#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

#include "ldrg/common.hpp"
#include "ldrg/local_graph.hpp"

namespace ldrg {

enum class TermKind {
    WithinEdgesTotal,
    WithinEdgesPerBlock,
    WithinEdgesByNodeGroup,
    WithinTransitiveEdgesTotal,
    WithinTransitiveEdgesByBlockGroup,
    BetweenEdgesTotal,
    BetweenEdgesPerPair,
};

/// One sufficient-statistic term. `a`/`b` carry the kind's parameter:
/// block index (PerBlock), node group (ByNodeGroup), block group
/// (ByBlockGroup) in `a`; the block pair (PerPair) in (a, b) with a < b.
/// All 0-based; names render 1-based.
struct Term {
    TermKind kind;
    int a = -1;
    int b = -1;

    bool within() const {
        return kind != TermKind::BetweenEdgesTotal && kind != TermKind::BetweenEdgesPerPair;
    }
    std::string name() const;
    bool operator==(const Term&) const = default;
};

/// Natural parameters split into the within vector (length p, shared by all
/// within-block subgraphs) and the between vector (length q).
struct ParamVector {
    Eigen::VectorXd within;
    Eigen::VectorXd between;

    int dim() const { return static_cast<int>(within.size() + between.size()); }
    static ParamVector zeros(int p, int q) {
        return {Eigen::VectorXd::Zero(p), Eigen::VectorXd::Zero(q)};
    }
};

void check_finite(const ParamVector& theta, const char* where);

/// Term list bound to a partition. Validates every index against the
/// partition and rejects duplicate terms at construction.
class ModelSpec {
public:
    static ModelSpec build(std::shared_ptr<const BlockPartition> partition,
                           std::vector<Term> within_terms,
                           std::vector<Term> between_terms);

    const BlockPartition& partition() const { return *part_; }
    std::shared_ptr<const BlockPartition> partition_ptr() const { return part_; }

    int p() const { return static_cast<int>(within_.size()); }
    int q() const { return static_cast<int>(between_.size()); }
    int dim() const { return p() + q(); }

    const std::vector<Term>& within_terms() const { return within_; }
    const std::vector<Term>& between_terms() const { return between_; }

    /// Term names in statistic order (within block then between block).
    std::vector<std::string> term_names() const;

    bool needs_transitive() const { return needs_transitive_; }
    bool needs_node_groups() const { return needs_node_groups_; }

private:
    std::shared_ptr<const BlockPartition> part_;
    std::vector<Term> within_;
    std::vector<Term> between_;
    bool needs_transitive_ = false;
    bool needs_node_groups_ = false;
};

/// Full sufficient statistic vector, within slice first. Counts are
/// recomputed from the graph's bitsets, not from incremental caches.
StatVector compute_statistics(const LocalGraph& g, const ModelSpec& spec);

/// Statistic vector restricted to one local subgraph (zero elsewhere):
/// within refs fill only the first p slots, between refs only the last q.
StatVector subgraph_statistics(const LocalGraph& g, const ModelSpec& spec, SubgraphRef ref);

/// s(toggled graph) - s(current graph) for the pair {i, j}.
StatVector change_statistics(const LocalGraph& g, const ModelSpec& spec, int i, int j);

/// Slice forms used by samplers and enumeration; `out` must hold p (within)
/// or q (between) entries. The within forms require both nodes in one block.
void within_stats_slice(const LocalGraph& g, const ModelSpec& spec, int k, std::int64_t* out);
void within_change_slice(const LocalGraph& g, const ModelSpec& spec, int i, int j,
                         std::int64_t* out);
void between_stats_slice(const LocalGraph& g, const ModelSpec& spec, int k, int l,
                         std::int64_t* out);
void between_change_slice(const LocalGraph& g, const ModelSpec& spec, int i, int j,
                          std::int64_t* out);

/// Attainable [min, max] of each statistic coordinate over all graphs on the
/// partition; used for boundary (nonexistence) screening.
void statistic_range(const ModelSpec& spec, StatVector& lo, StatVector& hi);

} // namespace ldrg
