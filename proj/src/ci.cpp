#include "causalts/ci.hpp"

#include <cmath>

#include "causalts/errors.hpp"
#include "causalts/mathutil.hpp"

namespace causalts {

FisherZTest::FisherZTest(const Eigen::MatrixXd& data, double alpha) : alpha_(alpha) { init(data); }

FisherZTest::FisherZTest(const SeriesFrame& frame, double alpha) : alpha_(alpha) {
    init(frame.values);
}

void FisherZTest::init(const Eigen::MatrixXd& data) {
    if (alpha_ <= 0.0 || alpha_ >= 1.0) throw ConfigError("CI significance level must be in (0,1)");
    n_samples_ = static_cast<int>(data.rows());
    const auto d = data.cols();
    if (d < 2) throw DataError("CI test needs at least two variables");
    Eigen::RowVectorXd mean = data.colwise().mean();
    Eigen::MatrixXd centered = data.rowwise() - mean;
    Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n_samples_);
    Eigen::VectorXd sd = cov.diagonal().array().sqrt();
    corr_.resize(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            double denom = sd(i) * sd(j);
            corr_(i, j) = denom > 0.0 ? cov(i, j) / denom : 0.0;
        }
    }
}

double fisher_z_statistic(double r, int n, int z_size) {
    double z = 0.5 * std::log((1.0 + r) / (1.0 - r));
    return std::sqrt(static_cast<double>(n - z_size - 3)) * std::fabs(z);
}

CiResult FisherZTest::test(int a, int b, const std::vector<int>& z) {
    const int zs = static_cast<int>(z.size());
    if (n_samples_ <= zs + 3) {
        throw DataError("Fisher-z needs n > |Z| + 3 (n=" + std::to_string(n_samples_) +
                        ", |Z|=" + std::to_string(zs) + ")");
    }
    const int k = 2 + zs;
    Eigen::MatrixXd sub(k, k);
    std::vector<int> idx;
    idx.reserve(static_cast<std::size_t>(k));
    idx.push_back(a);
    idx.push_back(b);
    for (int v : z) idx.push_back(v);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            sub(i, j) = corr_(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        }
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    if (!lu.isInvertible()) {
        // Degenerate conditioning set: treat as dependent and flag it.
        return {false, 0.0, true};
    }
    Eigen::MatrixXd prec = lu.inverse();
    double denom = prec(0, 0) * prec(1, 1);
    if (!(denom > 0.0)) return {false, 0.0, true};
    double r = -prec(0, 1) / std::sqrt(denom);
    // Guard against rounding pushing |r| to 1 for near-degenerate submatrices.
    constexpr double r_cap = 1.0 - 1e-12;
    if (r > r_cap) r = r_cap;
    if (r < -r_cap) r = -r_cap;

    double stat = fisher_z_statistic(r, n_samples_, zs);
    double p = std::erfc(stat / std::sqrt(2.0));  // = 2 * (1 - Phi(stat))
    return {p > alpha_, p, false};
}

}  // namespace causalts
