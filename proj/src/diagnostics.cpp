#include "ldrg/diagnostics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "ldrg/common.hpp"

namespace ldrg {

namespace {

// Extreme eigenvalues of a symmetric matrix; (0, 0) for an empty one.
std::pair<double, double> spectrum_range(const Eigen::MatrixXd& m) {
    if (m.rows() == 0) return {0.0, 0.0};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericError("theory_quantities: eigendecomposition failed");
    }
    return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

} // namespace

TheoryQuantities theory_quantities(const BlockPartition& part,
                                   const Eigen::MatrixXd& info_within_full,
                                   const Eigen::MatrixXd& info_between_full) {
    if (info_within_full.rows() != info_within_full.cols() ||
        info_between_full.rows() != info_between_full.cols()) {
        throw DataError("theory_quantities: information matrices must be square");
    }
    TheoryQuantities tq;
    tq.n = part.n_nodes();
    tq.k = part.n_blocks();
    tq.a_avg = part.average_block_size();
    tq.a_max = part.max_block_size();
    tq.p = static_cast<int>(info_within_full.rows());
    tq.q = static_cast<int>(info_between_full.rows());

    double kk = static_cast<double>(tq.k);
    auto [lo_w, hi_w] = spectrum_range(info_within_full / kk);
    tq.lambda_max_within = hi_w;
    tq.lambda_min_within = lo_w;
    if (tq.p > 0 && lo_w <= 0) {
        tq.lambda_min_within = 0;
        tq.singular_warning = true;
    }
    double n_pairs = kk * (kk - 1) / 2;
    if (tq.q > 0 && n_pairs > 0) {
        auto [lo_b, hi_b] = spectrum_range(info_between_full / n_pairs);
        tq.lambda_max_between = hi_b;
        tq.lambda_min_between = lo_b;
        if (lo_b <= 0) {
            tq.lambda_min_between = 0;
            tq.singular_warning = true;
        }
    } else if (tq.q > 0) {
        tq.singular_warning = true;
    }
    return tq;
}

BoundRecord bound_expressions(const TheoryQuantities& tq, double c) {
    if (!(c > 0)) throw DataError("bound_expressions: c must be positive");
    BoundRecord out;
    double nan = std::numeric_limits<double>::quiet_NaN();
    out.within_bound = nan;
    out.between_bound = nan;
    double ceiling = std::numeric_limits<double>::infinity();
    double n = static_cast<double>(tq.n);

    if (tq.p > 0) {
        if (tq.lambda_min_within <= 0) {
            throw NumericError("bound_expressions: within spectral minimum is zero");
        }
        out.within_bound = c * std::sqrt(tq.a_avg) * std::sqrt(tq.lambda_max_within) /
                           tq.lambda_min_within * std::sqrt(static_cast<double>(tq.p) / n);
        ceiling = std::min(ceiling, std::pow(n * tq.lambda_max_within /
                                                 (tq.a_avg * static_cast<double>(tq.p) * tq.p),
                                             0.25));
    }
    if (tq.q > 0) {
        if (tq.lambda_min_between <= 0) {
            throw NumericError("bound_expressions: between spectral minimum is zero");
        }
        out.between_bound = c * tq.a_avg * std::sqrt(tq.lambda_max_between) /
                            tq.lambda_min_between * std::sqrt(static_cast<double>(tq.q) / (n * n));
        ceiling = std::min(ceiling, std::pow(n * n * tq.lambda_max_between /
                                                 (4.0 * tq.a_avg * tq.a_avg *
                                                  static_cast<double>(tq.q) * tq.q),
                                             0.25));
    }
    if (tq.p == 0 && tq.q == 0) {
        throw DataError("bound_expressions: model has no parameters");
    }
    out.a_max_ceiling = ceiling;
    out.a_max_ok = static_cast<double>(tq.a_max) <= ceiling;
    return out;
}

PredictedError predicted_error(const std::map<int, double>& q95_by_n,
                               const std::map<int, int>& p_by_n) {
    if (q95_by_n.empty()) throw DataError("predicted_error: no quantiles supplied");
    PredictedError out;
    double acc = 0;
    for (const auto& [n, quant] : q95_by_n) {
        auto it = p_by_n.find(n);
        if (it == p_by_n.end()) {
            throw DataError("predicted_error: no parameter dimension for N = " + std::to_string(n));
        }
        if (n <= 0 || it->second <= 0) {
            throw DataError("predicted_error: N and p must be positive");
        }
        double rate = std::sqrt(static_cast<double>(it->second) / static_cast<double>(n));
        out.c_by_n[n] = quant / rate;
        acc += out.c_by_n[n];
    }
    out.c_mean = acc / static_cast<double>(q95_by_n.size());
    for (const auto& [n, quant] : q95_by_n) {
        (void)quant;
        double rate = std::sqrt(static_cast<double>(p_by_n.at(n)) / static_cast<double>(n));
        out.e_by_n[n] = out.c_mean * rate;
    }
    return out;
}

} // namespace ldrg
