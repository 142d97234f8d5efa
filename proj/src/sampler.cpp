#include "ldrg/sampler.hpp"

namespace ldrg {

LocalGraph sample_graph(const ModelSpec& spec, const ParamVector& theta, std::uint64_t root_seed,
                        std::int64_t replication, const SamplerOptions& opts, bool skip_between) {
    check_finite(theta, "sample_graph");
    if (static_cast<int>(theta.within.size()) != spec.p() ||
        static_cast<int>(theta.between.size()) != spec.q()) {
        throw DataError("sample_graph: parameter dimensions do not match the model");
    }
    auto part = spec.partition_ptr();
    LocalGraph g(part);
    for (int s = 0; s < part->n_subgraphs(); ++s) {
        SubgraphRef ref = part->subgraph_at(s);
        if (skip_between && !ref.within()) continue;
        std::uint64_t stream = derive_stream(
            {root_seed, static_cast<std::uint64_t>(replication), static_cast<std::uint64_t>(s)});
        run_subgraph_chain(g, spec, theta, ref, 1, opts, stream,
                           [](const LocalGraph&, const std::int64_t*) {});
    }
    return g;
}

std::vector<std::vector<std::int64_t>> sample_subgraph_slices(
    LocalGraph& g, const ModelSpec& spec, const ParamVector& theta, SubgraphRef ref,
    std::int64_t n_draws, const SamplerOptions& opts, std::uint64_t stream_seed) {
    check_finite(theta, "sample_subgraph_slices");
    std::vector<std::vector<std::int64_t>> out;
    out.reserve(static_cast<std::size_t>(n_draws));
    int sd = ref.within() ? spec.p() : spec.q();
    run_subgraph_chain(g, spec, theta, ref, n_draws, opts, stream_seed,
                       [&](const LocalGraph&, const std::int64_t* slice) {
                           out.emplace_back(slice, slice + sd);
                       });
    return out;
}

std::vector<std::uint64_t> sample_subgraph_states(LocalGraph& g, const ModelSpec& spec,
                                                  const ParamVector& theta, SubgraphRef ref,
                                                  std::int64_t n_draws, const SamplerOptions& opts,
                                                  std::uint64_t stream_seed) {
    check_finite(theta, "sample_subgraph_states");
    std::vector<std::uint64_t> out;
    out.reserve(static_cast<std::size_t>(n_draws));
    run_subgraph_chain(g, spec, theta, ref, n_draws, opts, stream_seed,
                       [&](const LocalGraph& graph, const std::int64_t*) {
                           out.push_back(graph.state_mask(ref));
                       });
    return out;
}

} // namespace ldrg
