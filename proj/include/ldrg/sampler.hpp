#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ldrg/model.hpp"
#include "ldrg/rng.hpp"

namespace ldrg {

struct SamplerOptions {
    double burnin_multiplier = 10.0;
    double interval_multiplier = 1.0;
};

/// Metropolis chain over one local subgraph: proposals pick an edge variable
/// uniformly and toggle it with probability min(1, exp(<theta, delta s>)).
/// Burn-in runs ceil(burnin_multiplier * D) proposals, after which a draw is
/// retained every ceil(interval_multiplier * D) proposals, the first at the
/// end of burn-in. The graph is modified in place (other subgraphs are
/// untouched); sink(graph, slice) receives each retained draw with the
/// subgraph's running statistic slice (length p for within, q for between).
template <typename Sink>
void run_subgraph_chain(LocalGraph& g, const ModelSpec& spec, const ParamVector& theta,
                        SubgraphRef ref, std::int64_t n_draws, const SamplerOptions& opts,
                        std::uint64_t stream_seed, Sink&& sink) {
    const bool within = ref.within();
    const Eigen::VectorXd& th = within ? theta.within : theta.between;
    const int sd = static_cast<int>(th.size());
    const std::int64_t d = g.n_vars(ref);

    std::vector<std::int64_t> slice(static_cast<std::size_t>(sd), 0);
    if (sd > 0) {
        if (within) {
            within_stats_slice(g, spec, ref.k, slice.data());
        } else {
            between_stats_slice(g, spec, ref.k, ref.l, slice.data());
        }
    }
    if (d == 0) {
        for (std::int64_t t = 0; t < n_draws; ++t) sink(g, slice.data());
        return;
    }

    std::vector<std::pair<int, int>> var_nodes(static_cast<std::size_t>(d));
    for (std::int64_t v = 0; v < d; ++v) var_nodes[static_cast<std::size_t>(v)] = g.var_nodes(ref, v);

    Rng rng(stream_seed);
    std::vector<std::int64_t> delta(static_cast<std::size_t>(sd), 0);
    const std::int64_t burnin = static_cast<std::int64_t>(std::ceil(opts.burnin_multiplier * static_cast<double>(d)));
    const std::int64_t spacing = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(opts.interval_multiplier * static_cast<double>(d))));

    auto propose = [&]() {
        auto [i, j] = var_nodes[static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(d)))];
        double dot = 0;
        if (sd > 0) {
            if (within) {
                within_change_slice(g, spec, i, j, delta.data());
            } else {
                between_change_slice(g, spec, i, j, delta.data());
            }
            for (int c = 0; c < sd; ++c) dot += th[c] * static_cast<double>(delta[static_cast<std::size_t>(c)]);
        }
        if (dot >= 0 || rng.next_double() < std::exp(dot)) {
            g.toggle_edge(i, j);
            for (int c = 0; c < sd; ++c) slice[static_cast<std::size_t>(c)] += delta[static_cast<std::size_t>(c)];
        }
    };

    for (std::int64_t t = 0; t < burnin; ++t) propose();
    if (n_draws <= 0) return;
    sink(g, slice.data());
    for (std::int64_t draw = 1; draw < n_draws; ++draw) {
        for (std::int64_t t = 0; t < spacing; ++t) propose();
        sink(g, slice.data());
    }
}

/// One independent draw of the full graph: every subgraph gets a fresh chain
/// from the empty state with a stream derived from (root_seed, replication,
/// subgraph index), so draws are reproducible regardless of scheduling.
/// skip_between leaves between-block subgraphs empty with probability one.
LocalGraph sample_graph(const ModelSpec& spec, const ParamVector& theta, std::uint64_t root_seed,
                        std::int64_t replication, const SamplerOptions& opts = {},
                        bool skip_between = false);

/// Retained statistic slices from a single subgraph chain started at the
/// current state of g (convenience wrapper over run_subgraph_chain).
std::vector<std::vector<std::int64_t>> sample_subgraph_slices(
    LocalGraph& g, const ModelSpec& spec, const ParamVector& theta, SubgraphRef ref,
    std::int64_t n_draws, const SamplerOptions& opts, std::uint64_t stream_seed);

/// Retained state bitmasks (requires n_vars(ref) <= 64).
std::vector<std::uint64_t> sample_subgraph_states(LocalGraph& g, const ModelSpec& spec,
                                                  const ParamVector& theta, SubgraphRef ref,
                                                  std::int64_t n_draws, const SamplerOptions& opts,
                                                  std::uint64_t stream_seed);

} // namespace ldrg
