#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <vector>

#include "helpers.hpp"
#include "ldrg/exact.hpp"
#include "ldrg/model.hpp"
#include "ldrg/rng.hpp"
#include "ldrg/sampler.hpp"

using namespace ldrg;
using test_helpers::make_partition;

namespace {

ModelSpec edges_only_block3() {
    return ModelSpec::build(make_partition({3}), {{TermKind::WithinEdgesTotal}}, {});
}

ModelSpec edges_transitive_block(int size) {
    return ModelSpec::build(make_partition({size}),
                            {{TermKind::WithinEdgesTotal}, {TermKind::WithinTransitiveEdgesTotal}},
                            {});
}

/// Independent triangle enumeration: 3 explicit edge bits, statistics
/// recomputed from scratch per state.
std::vector<std::pair<int, int>> triangle_states() {
    std::vector<std::pair<int, int>> out;
    for (int mask = 0; mask < 8; ++mask) {
        bool e01 = mask & 1, e02 = mask & 2, e12 = mask & 4;
        int edges = static_cast<int>(e01) + static_cast<int>(e02) + static_cast<int>(e12);
        int trans = 0;
        if (e01 && e02 && e12) trans = 3;
        out.push_back({edges, trans});
    }
    return out;
}

double fd_partial(const std::function<double(const Eigen::VectorXd&)>& f,
                  const Eigen::VectorXd& x, int j, double h) {
    Eigen::VectorXd up = x, down = x;
    up[j] += h;
    down[j] -= h;
    return (f(up) - f(down)) / (2 * h);
}

} // namespace

TEST_SUITE("exact") {

TEST_CASE("log normalizer closed forms") {
    ModelSpec spec = edges_only_block3();
    ExactTable t = build_exact_table(spec, {0, 0});
    CHECK(t.d == 3);
    CHECK(t.n_states() == 8);
    Eigen::VectorXd zero(1), half(1);
    zero << 0.0;
    half << 0.5;
    CHECK(table_log_normalizer(t, zero) == doctest::Approx(2.0794415416798357).epsilon(1e-14));
    CHECK(table_log_normalizer(t, half) == doctest::Approx(2.9222309525403203).epsilon(1e-14));
}

TEST_CASE("log normalizer of the dependent triangle") {
    ModelSpec spec = edges_transitive_block(3);
    ExactTable t = build_exact_table(spec, {0, 0});
    Eigen::VectorXd theta(2);
    theta << -1.0, 0.5;
    double by_hand = 0;
    for (auto [edges, trans] : triangle_states()) {
        by_hand += std::exp(-1.0 * edges + 0.5 * trans);
    }
    by_hand = std::log(by_hand);
    CHECK(table_log_normalizer(t, theta) == doctest::Approx(by_hand).epsilon(1e-14));
    CHECK(table_log_normalizer(t, theta) ==
          doctest::Approx(1.0053173325058722).epsilon(1e-14));
}

TEST_CASE("mean value closed forms") {
    ModelSpec spec = edges_only_block3();
    ExactTable t = build_exact_table(spec, {0, 0});
    Eigen::VectorXd zero(1), quarter(1);
    zero << 0.0;
    quarter << -1.0986122886681098; // logit(0.25)
    CHECK(table_mean(t, zero)[0] == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(table_mean(t, quarter)[0] == doctest::Approx(0.75).epsilon(1e-12));

    ModelSpec dep = edges_transitive_block(3);
    ExactTable td = build_exact_table(dep, {0, 0});
    Eigen::VectorXd mean = table_mean(td, Eigen::VectorXd::Zero(2));
    // at theta = 0 only the complete state carries transitive edges: 3/8
    CHECK(mean[0] == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(mean[1] == doctest::Approx(0.375).epsilon(1e-13));
}

TEST_CASE("fisher information closed forms") {
    ModelSpec spec = edges_only_block3();
    ExactTable t = build_exact_table(spec, {0, 0});
    Eigen::MatrixXd info = table_information(t, Eigen::VectorXd::Zero(1));
    CHECK(info(0, 0) == doctest::Approx(0.75).epsilon(1e-13));
}

TEST_CASE("table rows match direct recounts") {
    auto part = make_partition({4, 3}, 2, 1);
    ModelSpec spec = ModelSpec::build(part,
                                      {{TermKind::WithinEdgesTotal},
                                       {TermKind::WithinEdgesByNodeGroup, 0},
                                       {TermKind::WithinTransitiveEdgesTotal}},
                                      {{TermKind::BetweenEdgesTotal}});
    LocalGraph g(part);
    for (int s = 0; s < part->n_subgraphs(); ++s) {
        SubgraphRef ref = part->subgraph_at(s);
        ExactTable t = build_exact_table(spec, ref);
        CHECK(t.stat_dim == (ref.within() ? spec.p() : spec.q()));
        for (std::int64_t state = 0; state < t.n_states(); ++state) {
            g.clear_subgraph(ref);
            for (int v = 0; v < t.d; ++v) {
                if ((state >> v) & 1) {
                    auto [i, j] = g.var_nodes(ref, v);
                    g.toggle_edge(i, j);
                }
            }
            StatVector full = subgraph_statistics(g, spec, ref);
            const std::int64_t* row = t.row(static_cast<std::uint64_t>(state));
            int offset = ref.within() ? 0 : spec.p();
            for (int c = 0; c < t.stat_dim; ++c) {
                CHECK(row[c] == full[static_cast<std::size_t>(offset + c)]);
            }
        }
        g.clear_subgraph(ref);
    }
}

TEST_CASE("distribution is a probability vector") {
    ModelSpec spec = edges_transitive_block(4);
    ExactTable t = build_exact_table(spec, {0, 0});
    Eigen::VectorXd theta(2);
    theta << -0.5, 0.5;
    std::vector<double> dist = table_distribution(t, theta);
    REQUIRE(dist.size() == 64);
    double total = std::accumulate(dist.begin(), dist.end(), 0.0);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    double psi = table_log_normalizer(t, theta);
    for (std::uint64_t state = 0; state < 64; ++state) {
        const std::int64_t* row = t.row(state);
        double expected = std::exp(theta[0] * static_cast<double>(row[0]) +
                                   theta[1] * static_cast<double>(row[1]) - psi);
        CHECK(dist[state] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("derivatives of the log normalizer") {
    auto part = make_partition({4, 3}, 2, 1);
    ModelSpec spec = ModelSpec::build(part,
                                      {{TermKind::WithinEdgesTotal},
                                       {TermKind::WithinTransitiveEdgesTotal}},
                                      {{TermKind::BetweenEdgesTotal}});
    ExactModel exact(part, spec);
    Rng rng(404);
    for (int rep = 0; rep < 20; ++rep) {
        ParamVector theta = ParamVector::zeros(spec.p(), spec.q());
        for (int c = 0; c < spec.p(); ++c) theta.within[c] = -2.0 + 4.0 * rng.next_double();
        for (int c = 0; c < spec.q(); ++c) theta.between[c] = -2.0 + 4.0 * rng.next_double();

        auto [mean_w, mean_b] = exact.mean_value(theta);
        auto psi_of = [&](const Eigen::VectorXd& full) {
            ParamVector th = theta;
            th.within = full.head(spec.p());
            th.between = full.tail(spec.q());
            return exact.log_normalizer(th);
        };
        Eigen::VectorXd full(spec.dim());
        full << theta.within, theta.between;
        const double h = 1e-5;
        for (int j = 0; j < spec.dim(); ++j) {
            double fd = fd_partial(psi_of, full, j, h);
            double analytic = j < spec.p() ? mean_w[j] : mean_b[j - spec.p()];
            CHECK(std::abs(fd - analytic) <= 1e-6);
        }

        auto [info_w, info_b] = exact.fisher_information(theta);
        for (int j = 0; j < spec.p(); ++j) {
            ParamVector up = theta, down = theta;
            up.within[j] += h;
            down.within[j] -= h;
            Eigen::VectorXd fd =
                (exact.mean_value(up).first - exact.mean_value(down).first) / (2 * h);
            for (int c = 0; c < spec.p(); ++c) CHECK(std::abs(fd[c] - info_w(c, j)) <= 1e-6);
        }
        for (int j = 0; j < spec.q(); ++j) {
            ParamVector up = theta, down = theta;
            up.between[j] += h;
            down.between[j] -= h;
            Eigen::VectorXd fd =
                (exact.mean_value(up).second - exact.mean_value(down).second) / (2 * h);
            for (int c = 0; c < spec.q(); ++c) CHECK(std::abs(fd[c] - info_b(c, j)) <= 1e-6);
        }
    }
}

TEST_CASE("a term with no members is degenerate") {
    // two populated node groups plus a forced third group that stays empty
    std::vector<int> groups = {0, 1, 0};
    auto forced = std::make_shared<BlockPartition>(BlockPartition::build({0, 0, 0}, groups, {}, 3));
    ModelSpec spec = ModelSpec::build(
        forced, {{TermKind::WithinEdgesTotal}, {TermKind::WithinEdgesByNodeGroup, 2}}, {});
    ExactModel exact(forced, spec);
    ParamVector theta = ParamVector::zeros(2, 0);
    theta.within << 0.3, -0.7;
    auto [mean_w, mean_b] = exact.mean_value(theta);
    CHECK(mean_w[1] == 0.0);
    auto [info_w, info_b] = exact.fisher_information(theta);
    CHECK(info_w.row(1).norm() == 0.0);
    CHECK(info_w.col(1).norm() == 0.0);
}

TEST_CASE("between table has the independent-edge closed form") {
    auto part = make_partition({2, 3});
    ModelSpec spec =
        ModelSpec::build(part, {{TermKind::WithinEdgesTotal}}, {{TermKind::BetweenEdgesTotal}});
    ExactTable t = build_exact_table(spec, {0, 1});
    CHECK(t.d == 6);
    Eigen::VectorXd theta(1);
    theta << 0.7;
    double closed = 6.0 * std::log1p(std::exp(0.7));
    CHECK(table_log_normalizer(t, theta) == doctest::Approx(closed).epsilon(1e-12));
}

TEST_CASE("enumeration cap is a data error") {
    auto part = make_partition({7});
    ModelSpec spec = ModelSpec::build(part, {{TermKind::WithinEdgesTotal}}, {});
    CHECK_THROWS_AS(build_exact_table(spec, {0, 0}), DataError);
    CHECK_THROWS_AS(ExactModel(part, spec), DataError);
    CHECK_NOTHROW(build_exact_table(spec, {0, 0}, 21));
}

TEST_CASE("mle matches the logit closed form on independent-edge models") {
    auto part = make_partition({4, 4});
    ModelSpec spec = ModelSpec::build(part,
                                      {{TermKind::WithinEdgesPerBlock, 0},
                                       {TermKind::WithinEdgesPerBlock, 1}},
                                      {{TermKind::BetweenEdgesPerPair, 0, 1}});
    LocalGraph g(part);
    // densities: block 1 -> 2/6, block 2 -> 3/6, between -> 4/16
    g.toggle_edge(0, 1);
    g.toggle_edge(2, 3);
    g.toggle_edge(4, 5);
    g.toggle_edge(4, 6);
    g.toggle_edge(6, 7);
    g.toggle_edge(0, 4);
    g.toggle_edge(1, 5);
    g.toggle_edge(2, 6);
    g.toggle_edge(3, 7);

    ExactModel exact(part, spec);
    ExactMleResult fit = exact.mle(g);
    REQUIRE(fit.status == FitStatus::Converged);
    auto logit = [](double d) { return std::log(d / (1 - d)); };
    CHECK(fit.theta.within[0] == doctest::Approx(logit(2.0 / 6.0)).epsilon(1e-8));
    CHECK(fit.theta.within[1] == doctest::Approx(logit(3.0 / 6.0)).epsilon(1e-8));
    CHECK(fit.theta.between[0] == doctest::Approx(logit(4.0 / 16.0)).epsilon(1e-8));

    // moment condition at the maximizer
    auto [mean_w, mean_b] = exact.mean_value(fit.theta);
    StatVector obs = compute_statistics(g, spec);
    CHECK(std::abs(mean_w[0] - static_cast<double>(obs[0])) <= 1e-6);
    CHECK(std::abs(mean_w[1] - static_cast<double>(obs[1])) <= 1e-6);
    CHECK(std::abs(mean_b[0] - static_cast<double>(obs[2])) <= 1e-6);
}

TEST_CASE("boundary statistics are flagged as nonexistence") {
    auto part = make_partition({3, 3});
    ModelSpec spec = ModelSpec::build(part,
                                      {{TermKind::WithinEdgesPerBlock, 0},
                                       {TermKind::WithinEdgesPerBlock, 1}},
                                      {});
    LocalGraph g(part);
    g.toggle_edge(3, 4); // block 2 interior
    SUBCASE("complete block attains the maximum") {
        g.toggle_edge(0, 1);
        g.toggle_edge(0, 2);
        g.toggle_edge(1, 2);
        CHECK(ExactModel(part, spec).mle(g).status == FitStatus::SuspectedNonexistence);
    }
    SUBCASE("empty block attains the minimum") {
        CHECK(ExactModel(part, spec).mle(g).status == FitStatus::SuspectedNonexistence);
    }
}

TEST_CASE("mle recovers the truth over replications") {
    std::vector<int> sizes(50, 4);
    auto part = make_partition(sizes);
    ModelSpec spec = ModelSpec::build(part,
                                      {{TermKind::WithinEdgesTotal},
                                       {TermKind::WithinTransitiveEdgesTotal}},
                                      {});
    ParamVector truth = ParamVector::zeros(2, 0);
    truth.within << -0.4, 0.3;
    ExactModel exact(part, spec);

    const int reps = 40;
    Eigen::MatrixXd estimates(reps, 2);
    int converged = 0;
    for (int rep = 0; rep < reps; ++rep) {
        LocalGraph g = sample_graph(spec, truth, 90210, rep);
        ExactMleResult fit = exact.mle(g);
        if (fit.status != FitStatus::Converged) continue;
        estimates.row(converged++) = fit.theta.within.transpose();
    }
    REQUIRE(converged >= reps - 2);
    Eigen::VectorXd mean = estimates.topRows(converged).colwise().mean().transpose();
    for (int c = 0; c < 2; ++c) {
        double sd = std::sqrt(
            (estimates.topRows(converged).col(c).array() - mean[c]).square().sum() /
            (converged - 1));
        double tol = 3.0 * sd / std::sqrt(static_cast<double>(converged)) + 0.02;
        CHECK(std::abs(mean[c] - truth.within[c]) <= tol);
    }
}

} // TEST_SUITE
