#include "causalts/granger.hpp"

#include <cmath>

#include "causalts/errors.hpp"
#include "causalts/mathutil.hpp"

namespace causalts {

namespace {

struct OlsFit {
    double rss = 0.0;
    bool ok = false;
};

OlsFit least_squares_rss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    OlsFit fit;
    if (qr.rank() < x.cols()) return fit;  // rank-deficient design
    Eigen::VectorXd beta = qr.solve(y);
    fit.rss = (y - x * beta).squaredNorm();
    fit.ok = true;
    return fit;
}

}  // namespace

GrangerResult granger_matrix(const SeriesFrame& frame, int lag) {
    frame.validate();
    if (lag < 1) throw ConfigError("granger lag must be >= 1");
    const int t_total = static_cast<int>(frame.rows());
    const int d = static_cast<int>(frame.cols());
    if (t_total <= 2 * lag + 10) {
        throw DataError("granger needs T > 2*lag + 10 (T=" + std::to_string(t_total) + ")");
    }

    const int n_obs = t_total - lag;  // usable rows: t = lag .. T-1
    GrangerResult out;
    out.lag = lag;
    out.neg_log_p = Eigen::MatrixXd::Zero(d, d);
    out.warnings = Eigen::MatrixXi::Zero(d, d);

    // Lagged regressor block: column block v holds lags 1..lag of variable v.
    Eigen::MatrixXd lags(n_obs, d * lag);
    for (int v = 0; v < d; ++v) {
        for (int l = 1; l <= lag; ++l) {
            lags.col(static_cast<Eigen::Index>(v) * lag + (l - 1)) =
                frame.values.col(v).segment(lag - l, n_obs);
        }
    }
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(n_obs);

    for (int n = 0; n < d; ++n) {
        Eigen::VectorXd y = frame.values.col(n).segment(lag, n_obs);
        Eigen::MatrixXd x_r(n_obs, 1 + lag);
        x_r.col(0) = ones;
        x_r.rightCols(lag) = lags.middleCols(static_cast<Eigen::Index>(n) * lag, lag);
        OlsFit restricted = least_squares_rss(x_r, y);

        for (int m = 0; m < d; ++m) {
            if (m == n) continue;
            Eigen::MatrixXd x_u(n_obs, 1 + 2 * lag);
            x_u.leftCols(1 + lag) = x_r;
            x_u.rightCols(lag) = lags.middleCols(static_cast<Eigen::Index>(m) * lag, lag);
            OlsFit full = least_squares_rss(x_u, y);

            const double dof = static_cast<double>(n_obs - 2 * lag - 1);
            if (!restricted.ok || !full.ok || dof < 1.0 || !(full.rss > 0.0)) {
                out.warnings(m, n) = 1;  // entry left at 0
                continue;
            }
            double f = ((restricted.rss - full.rss) / static_cast<double>(lag)) / (full.rss / dof);
            if (f < 0.0) f = 0.0;  // nested models; negative only via rounding
            double p = f_test_pvalue(f, static_cast<double>(lag), dof);
            if (p < 1e-300) p = 1e-300;  // keep the log finite
            out.neg_log_p(m, n) = -std::log(p);
        }
    }
    return out;
}

}  // namespace causalts
