#include "ldrg/inference.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

namespace ldrg {

InfoEstimate fisher_hat(const LocalGraph& g, const ModelSpec& spec) {
    const auto& part = spec.partition();
    int kk = part.n_blocks();
    if (kk < 2) {
        throw DataError("fisher_hat: needs at least 2 blocks, got " + std::to_string(kk));
    }
    InfoEstimate out;
    out.n_blocks = kk;

    int p = spec.p();
    Eigen::MatrixXd sw(kk, p);
    std::vector<std::int64_t> buf(static_cast<std::size_t>(std::max(spec.p(), spec.q())), 0);
    for (int k = 0; k < kk; ++k) {
        within_stats_slice(g, spec, k, buf.data());
        for (int c = 0; c < p; ++c) sw(k, c) = static_cast<double>(buf[static_cast<std::size_t>(c)]);
    }
    Eigen::RowVectorXd mean_w = sw.colwise().mean();
    Eigen::MatrixXd centered_w = sw.rowwise() - mean_w;
    out.within_avg = centered_w.transpose() * centered_w / static_cast<double>(kk);
    out.within_full = out.within_avg * static_cast<double>(kk);

    int q = spec.q();
    std::int64_t n_pairs = static_cast<std::int64_t>(kk) * (kk - 1) / 2;
    Eigen::MatrixXd sb(n_pairs, q);
    std::int64_t row = 0;
    for (int k = 0; k < kk; ++k) {
        for (int l = k + 1; l < kk; ++l, ++row) {
            between_stats_slice(g, spec, k, l, buf.data());
            for (int c = 0; c < q; ++c) sb(row, c) = static_cast<double>(buf[static_cast<std::size_t>(c)]);
        }
    }
    Eigen::RowVectorXd mean_b = sb.colwise().mean();
    Eigen::MatrixXd centered_b = sb.rowwise() - mean_b;
    out.between_avg = centered_b.transpose() * centered_b / static_cast<double>(n_pairs);
    out.between_full = out.between_avg * static_cast<double>(n_pairs);
    return out;
}

MatrixRoots matrix_inv_sqrt(const Eigen::MatrixXd& m, double floor) {
    if (m.rows() != m.cols()) throw DataError("matrix_inv_sqrt: matrix is not square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw NumericError("matrix_inv_sqrt: eigendecomposition failed");
    Eigen::VectorXd lam = es.eigenvalues();
    for (int c = 0; c < lam.size(); ++c) {
        if (lam[c] < -1e-8) {
            throw NumericError("matrix_inv_sqrt: matrix is not positive semidefinite (eigenvalue " +
                               std::to_string(lam[c]) + ")");
        }
        lam[c] = std::max(lam[c], floor);
    }
    MatrixRoots out;
    out.sqrt = es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    out.inv_sqrt =
        es.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    return out;
}

std::vector<CiEntry> wald_ci(const Eigen::VectorXd& estimate, const Eigen::MatrixXd& s,
                             double alpha) {
    if (s.rows() != s.cols() || s.rows() != estimate.size()) {
        throw DataError("wald_ci: dimension mismatch between estimate and covariance");
    }
    if (!(alpha > 0 && alpha < 1)) throw DataError("wald_ci: alpha must lie in (0, 1)");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    if (es.info() != Eigen::Success) throw NumericError("wald_ci: eigendecomposition failed");
    const Eigen::VectorXd& lam = es.eigenvalues();
    for (int c = 0; c < lam.size(); ++c) {
        if (lam[c] <= 1e-10) {
            int worst = 0;
            es.eigenvectors().col(c).cwiseAbs().maxCoeff(&worst);
            throw NumericError("wald_ci: statistic covariance is singular at coordinate " +
                               std::to_string(worst + 1) + " (eigenvalue " + std::to_string(lam[c]) +
                               ")");
        }
    }
    Eigen::MatrixXd inv = es.eigenvectors() * lam.cwiseInverse().asDiagonal() *
                          es.eigenvectors().transpose();
    double z = normal_quantile(1.0 - alpha / 2.0);
    std::vector<CiEntry> out(static_cast<std::size_t>(estimate.size()));
    for (int j = 0; j < estimate.size(); ++j) {
        double se = std::sqrt(inv(j, j));
        out[static_cast<std::size_t>(j)] = {estimate[j], se, estimate[j] - z * se,
                                            estimate[j] + z * se};
    }
    return out;
}

std::vector<std::pair<double, double>> qq_points(std::vector<double> values) {
    if (values.empty()) throw DataError("qq_points: no values");
    std::sort(values.begin(), values.end());
    std::vector<std::pair<double, double>> out(values.size());
    auto n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = {normal_quantile((static_cast<double>(i) + 0.5) / n), values[i]};
    }
    return out;
}

double normal_quantile(double p) {
    // AS 241 algorithm PPND16 (Wichura 1988): rational approximations on
    // the central and tail regions, |relative error| < 1e-15.
    if (!(p > 0 && p < 1)) throw DataError("normal_quantile: p must lie in (0, 1)");
    double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    double r = q < 0 ? p : 1 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                  3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0 ? -val : val;
}

} // namespace ldrg
