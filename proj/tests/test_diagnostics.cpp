#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <map>

#include "helpers.hpp"
#include "ldrg/diagnostics.hpp"

using namespace ldrg;
using test_helpers::make_partition;

namespace {

TheoryQuantities by_hand(int n, double a_avg, int a_max, int p, int q, double lw_max,
                         double lw_min, double lb_max, double lb_min) {
    TheoryQuantities tq;
    tq.n = n;
    tq.a_avg = a_avg;
    tq.a_max = a_max;
    tq.p = p;
    tq.q = q;
    tq.lambda_max_within = lw_max;
    tq.lambda_min_within = lw_min;
    tq.lambda_max_between = lb_max;
    tq.lambda_min_between = lb_min;
    return tq;
}

} // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("size quantities from the partition") {
    auto even = make_partition({50, 50, 50, 50, 50});
    TheoryQuantities tq = theory_quantities(*even, Eigen::MatrixXd::Identity(1, 1),
                                            Eigen::MatrixXd(0, 0));
    CHECK(tq.n == 250);
    CHECK(tq.k == 5);
    CHECK(tq.a_avg == 50.0);
    CHECK(tq.a_max == 50);
    CHECK(tq.p == 1);
    CHECK(tq.q == 0);
    CHECK_FALSE(tq.eps_ball);

    auto uneven = make_partition({2, 4, 6});
    TheoryQuantities tu = theory_quantities(*uneven, Eigen::MatrixXd::Identity(1, 1),
                                            Eigen::MatrixXd(0, 0));
    CHECK(tu.a_avg == 4.0);
    CHECK(tu.a_max == 6);
}

TEST_CASE("spectra are per-subgraph averages") {
    auto part = make_partition({3, 3, 3, 3});
    Eigen::MatrixXd info_w = 4.0 * Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd info_b = 6.0 * Eigen::MatrixXd::Identity(1, 1); // C(4,2) = 6
    TheoryQuantities tq = theory_quantities(*part, info_w, info_b);
    CHECK(tq.lambda_max_within == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(tq.lambda_min_within == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(tq.lambda_max_between == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(tq.lambda_min_between == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_FALSE(tq.singular_warning);
}

TEST_CASE("singular information sets the warning flag") {
    auto part = make_partition({3, 3});
    Eigen::MatrixXd singular(2, 2);
    singular << 1, 1, 1, 1;
    TheoryQuantities tq = theory_quantities(*part, singular, Eigen::MatrixXd(0, 0));
    CHECK(tq.singular_warning);
    CHECK(tq.lambda_min_within == 0.0);
    CHECK(tq.lambda_max_within > 0.0);
}

TEST_CASE("quantities ignore block labels") {
    std::vector<int> a = {0, 0, 1, 1, 1, 2};
    std::vector<int> b = {2, 2, 0, 0, 0, 1};
    auto pa = BlockPartition::build(a);
    auto pb = BlockPartition::build(b);
    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(1, 1);
    TheoryQuantities ta = theory_quantities(pa, w, Eigen::MatrixXd(0, 0));
    TheoryQuantities tb = theory_quantities(pb, w, Eigen::MatrixXd(0, 0));
    CHECK(ta.a_avg == tb.a_avg);
    CHECK(ta.a_max == tb.a_max);
    CHECK(ta.k == tb.k);
}

TEST_CASE("within bound worked example") {
    TheoryQuantities tq = by_hand(50, 50.0, 50, 4, 0, 1.0, 1.0, 0.0, 0.0);
    BoundRecord b = bound_expressions(tq, 1.0);
    CHECK(b.within_bound == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::isnan(b.between_bound));
}

TEST_CASE("between bound worked example") {
    TheoryQuantities tq = by_hand(100, 10.0, 10, 0, 1, 0.0, 0.0, 1.0, 1.0);
    BoundRecord b = bound_expressions(tq, 1.0);
    CHECK(b.between_bound == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(std::isnan(b.within_bound));
}

TEST_CASE("bounds are homogeneous in c") {
    TheoryQuantities tq = by_hand(200, 8.0, 9, 3, 2, 1.7, 0.4, 2.1, 0.6);
    BoundRecord one = bound_expressions(tq, 0.7);
    BoundRecord two = bound_expressions(tq, 1.4);
    CHECK(two.within_bound == doctest::Approx(2 * one.within_bound).epsilon(1e-15));
    CHECK(two.between_bound == doctest::Approx(2 * one.between_bound).epsilon(1e-15));
    CHECK(two.a_max_ceiling == one.a_max_ceiling);
}

TEST_CASE("zero spectral minimum on a needed side fails") {
    TheoryQuantities tq = by_hand(100, 5.0, 5, 2, 0, 1.0, 0.0, 0.0, 0.0);
    CHECK_THROWS_AS(bound_expressions(tq, 1.0), NumericError);
    TheoryQuantities tb = by_hand(100, 5.0, 5, 0, 2, 0.0, 0.0, 1.0, 0.0);
    CHECK_THROWS_AS(bound_expressions(tb, 1.0), NumericError);
    TheoryQuantities none = by_hand(100, 5.0, 5, 0, 0, 0, 0, 0, 0);
    CHECK_THROWS_AS(bound_expressions(none, 1.0), DataError);
    CHECK_THROWS_AS(bound_expressions(tq, 0.0), DataError);
}

TEST_CASE("block-size ceiling flips as p grows") {
    // blocks of 2, N=1000, unit spectra: ceiling = (1000 / (2 p^2))^{1/4}
    TheoryQuantities small_p = by_hand(1000, 2.0, 2, 2, 0, 1.0, 1.0, 0.0, 0.0);
    BoundRecord ok = bound_expressions(small_p, 1.0);
    CHECK(ok.a_max_ceiling == doctest::Approx(std::pow(125.0, 0.25)).epsilon(1e-12));
    CHECK(ok.a_max_ok);

    TheoryQuantities large_p = by_hand(1000, 2.0, 2, 40, 0, 1.0, 1.0, 0.0, 0.0);
    BoundRecord bad = bound_expressions(large_p, 1.0);
    CHECK(bad.a_max_ceiling < 2.0);
    CHECK_FALSE(bad.a_max_ok);
}

TEST_CASE("ceiling combines both sides") {
    TheoryQuantities tq = by_hand(100, 4.0, 4, 2, 3, 1.0, 0.5, 1.0, 0.5);
    BoundRecord b = bound_expressions(tq, 1.0);
    double within_side = std::pow(100.0 * 1.0 / (4.0 * 4.0), 0.25);
    double between_side = std::pow(100.0 * 100.0 * 1.0 / (4.0 * 16.0 * 9.0), 0.25);
    CHECK(b.a_max_ceiling == doctest::Approx(std::min(within_side, between_side)).epsilon(1e-12));
}

TEST_CASE("predicted error worked example") {
    PredictedError pe = predicted_error({{50, 0.4}}, {{50, 4}});
    CHECK(pe.c_by_n.at(50) == doctest::Approx(1.4142135623730951).epsilon(1e-12));
    CHECK(pe.c_mean == doctest::Approx(1.4142135623730951).epsilon(1e-12));
    // single N: the prediction collapses back to the observed quantile
    CHECK(pe.e_by_n.at(50) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("predicted error averages across sizes") {
    std::map<int, double> q = {{50, 0.4}, {200, 0.3}};
    std::map<int, int> p = {{50, 4}, {200, 4}};
    PredictedError pe = predicted_error(q, p);
    double c50 = 0.4 / std::sqrt(4.0 / 50.0);
    double c200 = 0.3 / std::sqrt(4.0 / 200.0);
    CHECK(pe.c_mean == doctest::Approx((c50 + c200) / 2).epsilon(1e-12));
    CHECK(pe.e_by_n.at(200) == doctest::Approx(pe.c_mean * std::sqrt(4.0 / 200.0)).epsilon(1e-12));

    // round trip: feeding the predictions back reproduces the mean constant
    PredictedError again = predicted_error(pe.e_by_n, p);
    CHECK(again.c_mean == doctest::Approx(pe.c_mean).epsilon(1e-12));
    for (const auto& [n, cval] : again.c_by_n) {
        CHECK(cval == doctest::Approx(pe.c_mean).epsilon(1e-12));
        (void)n;
    }
}

TEST_CASE("predicted error rejects bad inputs") {
    CHECK_THROWS_AS(predicted_error({}, {}), DataError);
    CHECK_THROWS_AS(predicted_error({{50, 0.4}}, {{60, 4}}), DataError);
    CHECK_THROWS_AS(predicted_error({{50, 0.4}}, {{50, 0}}), DataError);
}

} // TEST_SUITE
