#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "ldrg/model.hpp"
#include "ldrg/rng.hpp"

using namespace ldrg;
using test_helpers::make_partition;

namespace {

ModelSpec full_catalog_spec(std::shared_ptr<const BlockPartition> part) {
    std::vector<Term> within{{TermKind::WithinEdgesTotal},
                             {TermKind::WithinEdgesPerBlock, 0},
                             {TermKind::WithinEdgesByNodeGroup, 1},
                             {TermKind::WithinTransitiveEdgesTotal},
                             {TermKind::WithinTransitiveEdgesByBlockGroup, 0}};
    std::vector<Term> between{{TermKind::BetweenEdgesTotal}, {TermKind::BetweenEdgesPerPair, 0, 1}};
    return ModelSpec::build(std::move(part), within, between);
}

} // namespace

TEST_SUITE("model") {

TEST_CASE("term names") {
    CHECK(Term{TermKind::WithinEdgesTotal}.name() == "within_edges");
    CHECK(Term{TermKind::WithinEdgesPerBlock, 2}.name() == "within_edges_block_3");
    CHECK(Term{TermKind::WithinEdgesByNodeGroup, 0}.name() == "within_edges_group_1");
    CHECK(Term{TermKind::WithinTransitiveEdgesTotal}.name() == "within_transitive_edges");
    CHECK(Term{TermKind::WithinTransitiveEdgesByBlockGroup, 1}.name() ==
          "within_transitive_edges_blockgroup_2");
    CHECK(Term{TermKind::BetweenEdgesTotal}.name() == "between_edges");
    CHECK(Term{TermKind::BetweenEdgesPerPair, 0, 2}.name() == "between_edges_pair_1_3");
}

TEST_CASE("spec validation") {
    auto part = make_partition({3, 3}, 2, 1);
    CHECK_THROWS_AS(ModelSpec::build(part, {}, {}), DataError);
    CHECK_THROWS_AS(
        ModelSpec::build(part, {{TermKind::WithinEdgesPerBlock, 5}}, {}), DataError);
    CHECK_THROWS_AS(
        ModelSpec::build(part, {{TermKind::WithinEdgesByNodeGroup, 2}}, {}), DataError);
    CHECK_THROWS_AS(
        ModelSpec::build(part, {{TermKind::WithinTransitiveEdgesByBlockGroup, 1}}, {}), DataError);
    CHECK_THROWS_AS(
        ModelSpec::build(part, {}, {{TermKind::BetweenEdgesPerPair, 1, 0}}), DataError);
    CHECK_THROWS_AS(ModelSpec::build(part,
                                     {{TermKind::WithinEdgesTotal}, {TermKind::WithinEdgesTotal}},
                                     {}),
                    DataError);
    // between terms in the within list and vice versa
    CHECK_THROWS_AS(ModelSpec::build(part, {{TermKind::BetweenEdgesTotal}}, {}), DataError);
    CHECK_THROWS_AS(ModelSpec::build(part, {}, {{TermKind::WithinEdgesTotal}}), DataError);

    ModelSpec spec = full_catalog_spec(part);
    CHECK(spec.p() == 5);
    CHECK(spec.q() == 2);
    CHECK(spec.dim() == 7);
    CHECK(spec.needs_transitive());
    CHECK(spec.needs_node_groups());
    CHECK(spec.term_names().size() == 7);
}

TEST_CASE("check_finite rejects NaN") {
    ParamVector theta = ParamVector::zeros(2, 1);
    theta.within[1] = std::nan("");
    CHECK_THROWS_AS(check_finite(theta, "test"), DataError);
}

TEST_CASE("statistics on hand-checked graphs") {
    SUBCASE("empty graph gives the zero vector") {
        auto part = make_partition({3, 3}, 2, 1);
        LocalGraph g(part);
        ModelSpec spec = full_catalog_spec(part);
        StatVector s = compute_statistics(g, spec);
        CHECK(s == StatVector(7, 0));
    }
    SUBCASE("complete one-block triangle") {
        auto part = make_partition({3});
        LocalGraph g(part);
        g.toggle_edge(0, 1);
        g.toggle_edge(0, 2);
        g.toggle_edge(1, 2);
        ModelSpec spec = ModelSpec::build(
            part, {{TermKind::WithinEdgesTotal}, {TermKind::WithinTransitiveEdgesTotal}}, {});
        CHECK(compute_statistics(g, spec) == StatVector{3, 3});
    }
    SUBCASE("one within and one between edge") {
        auto part = make_partition({2, 2});
        LocalGraph g(part);
        g.toggle_edge(0, 1);
        g.toggle_edge(0, 2);
        ModelSpec spec =
            ModelSpec::build(part, {{TermKind::WithinEdgesTotal}}, {{TermKind::BetweenEdgesTotal}});
        CHECK(compute_statistics(g, spec) == StatVector{1, 1});
    }
}

TEST_CASE("change statistics on hand-checked graphs") {
    auto part = make_partition({3});
    LocalGraph g(part);
    ModelSpec spec = ModelSpec::build(
        part, {{TermKind::WithinEdgesTotal}, {TermKind::WithinTransitiveEdgesTotal}}, {});
    SUBCASE("first edge of an empty block") {
        CHECK(change_statistics(g, spec, 0, 1) == StatVector{1, 0});
    }
    SUBCASE("closing a two-path makes all three edges transitive") {
        g.toggle_edge(0, 2);
        g.toggle_edge(1, 2);
        CHECK(change_statistics(g, spec, 0, 1) == StatVector{1, 3});
    }
    SUBCASE("removing a triangle edge") {
        g.toggle_edge(0, 1);
        g.toggle_edge(0, 2);
        g.toggle_edge(1, 2);
        CHECK(change_statistics(g, spec, 0, 1) == StatVector{-1, -3});
    }
    SUBCASE("self-loop rejected") { CHECK_THROWS_AS(change_statistics(g, spec, 1, 1), DataError); }
}

TEST_CASE("node-group change rule counts each endpoint") {
    auto part = make_partition({4}, 2); // groups 0,1,0,1
    LocalGraph g(part);
    ModelSpec spec = ModelSpec::build(part,
                                      {{TermKind::WithinEdgesByNodeGroup, 0},
                                       {TermKind::WithinEdgesByNodeGroup, 1}},
                                      {});
    CHECK(change_statistics(g, spec, 0, 2) == StatVector{2, 0});
    CHECK(change_statistics(g, spec, 0, 1) == StatVector{1, 1});
    CHECK(change_statistics(g, spec, 1, 3) == StatVector{0, 2});
    g.toggle_edge(0, 2);
    CHECK(change_statistics(g, spec, 0, 2) == StatVector{-2, 0});
}

TEST_CASE("toggle consistency against the recount oracle") {
    auto part = make_partition({4, 3, 5}, 2, 2);
    LocalGraph g(part);
    ModelSpec spec = full_catalog_spec(part);
    Rng rng(91);
    test_helpers::EdgeSet edges;
    for (int step = 0; step < 1000; ++step) {
        auto [i, j] = test_helpers::random_pair(rng, part->n_nodes());
        StatVector before = compute_statistics(g, spec);
        StatVector delta = change_statistics(g, spec, i, j);
        g.toggle_edge(i, j);
        StatVector after = compute_statistics(g, spec);
        REQUIRE(after.size() == before.size());
        for (std::size_t c = 0; c < after.size(); ++c) {
            CHECK(after[c] == before[c] + delta[c]);
        }
        if (i > j) std::swap(i, j);
        if (!edges.insert({i, j}).second) edges.erase({i, j});
        CHECK(after == test_helpers::oracle_statistics(*part, edges, spec));
    }
}

TEST_CASE("additivity over subgraphs") {
    auto part = make_partition({4, 3, 5}, 2, 2);
    LocalGraph g(part);
    ModelSpec spec = full_catalog_spec(part);
    Rng rng(14);
    test_helpers::randomize_graph(g, rng, 0.4);
    StatVector total = compute_statistics(g, spec);
    StatVector summed(total.size(), 0);
    for (int s = 0; s < part->n_subgraphs(); ++s) {
        StatVector part_s = subgraph_statistics(g, spec, part->subgraph_at(s));
        for (std::size_t c = 0; c < summed.size(); ++c) summed[c] += part_s[c];
    }
    CHECK(summed == total);
}

TEST_CASE("within subgraph statistics leave between slots zero") {
    auto part = make_partition({4, 4}, 2, 1);
    LocalGraph g(part);
    Rng rng(5);
    test_helpers::randomize_graph(g, rng, 0.5);
    ModelSpec spec = full_catalog_spec(part);
    StatVector w = subgraph_statistics(g, spec, {0, 0});
    for (int c = spec.p(); c < spec.dim(); ++c) CHECK(w[static_cast<std::size_t>(c)] == 0);
    StatVector b = subgraph_statistics(g, spec, {0, 1});
    for (int c = 0; c < spec.p(); ++c) CHECK(b[static_cast<std::size_t>(c)] == 0);
}

TEST_CASE("change locality") {
    auto part = make_partition({4, 4}, 2, 1);
    ModelSpec spec = full_catalog_spec(part);
    LocalGraph g(part);
    Rng rng(31);
    test_helpers::randomize_graph(g, rng, 0.5);

    // a within toggle never moves between statistics
    StatVector within_delta = change_statistics(g, spec, 0, 1);
    for (int c = spec.p(); c < spec.dim(); ++c) {
        CHECK(within_delta[static_cast<std::size_t>(c)] == 0);
    }
    // a between toggle never moves within statistics
    StatVector between_delta = change_statistics(g, spec, 0, 5);
    for (int c = 0; c < spec.p(); ++c) CHECK(between_delta[static_cast<std::size_t>(c)] == 0);

    // the change depends only on the home subgraph's state
    LocalGraph h = g;
    h.clear_subgraph({1, 1});
    h.clear_subgraph({0, 1});
    CHECK(change_statistics(h, spec, 0, 1) == within_delta);
}

TEST_CASE("statistic ranges bound reachable values") {
    auto part = make_partition({4, 3}, 2, 1);
    ModelSpec spec = full_catalog_spec(part);
    StatVector lo, hi;
    statistic_range(spec, lo, hi);
    REQUIRE(static_cast<int>(lo.size()) == spec.dim());
    CHECK(lo == StatVector(7, 0));
    CHECK(hi[0] == 6 + 3);          // within edges
    CHECK(hi[1] == 6);              // block 1 pairs
    CHECK(hi[5] == 12);             // between edges
    CHECK(hi[6] == 12);             // pair (1,2)

    LocalGraph g(part);
    Rng rng(8);
    for (int rep = 0; rep < 50; ++rep) {
        test_helpers::randomize_graph(g, rng, rng.next_double());
        StatVector s = compute_statistics(g, spec);
        for (std::size_t c = 0; c < s.size(); ++c) {
            CHECK(s[c] >= lo[c]);
            CHECK(s[c] <= hi[c]);
        }
    }

    // complete graph attains every edge-count bound
    for (int i = 0; i < part->n_nodes(); ++i) {
        for (int j = i + 1; j < part->n_nodes(); ++j) {
            if (!g.has_edge(i, j)) g.toggle_edge(i, j);
        }
    }
    StatVector s = compute_statistics(g, spec);
    CHECK(s[0] == hi[0]);
    CHECK(s[3] == hi[3]); // all within edges transitive in complete blocks
    CHECK(s[5] == hi[5]);
}

} // TEST_SUITE
