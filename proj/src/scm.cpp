#include "causalts/scm.hpp"

#include <algorithm>
#include <string>

#include "causalts/errors.hpp"
#include "causalts/rng.hpp"

namespace causalts {

LinearScm::LinearScm(Dag dag_in, Eigen::MatrixXd weights_in, Eigen::VectorXd noise_std_in)
    : dag(std::move(dag_in)), weights(std::move(weights_in)), noise_std(std::move(noise_std_in)) {
    const int n = dag.n_vars();
    if (weights.rows() != n || weights.cols() != n || noise_std.size() != n) {
        throw DataError("SCM parameter shapes do not match the DAG");
    }
    for (int i = 0; i < n; ++i) {
        if (!(noise_std(i) > 0.0)) throw DataError("SCM noise std must be positive");
        for (int j = 0; j < n; ++j) {
            if (weights(i, j) != 0.0 && !dag.edge(i, j)) {
                throw DataError("weight on a non-edge (" + std::to_string(i) + "," +
                                std::to_string(j) + ")");
            }
        }
    }
}

LinearScm LinearScm::random(const Dag& dag, std::uint64_t seed, double w_lo, double w_hi,
                            double noise, bool mixed_signs) {
    if (!(0.0 < w_lo && w_lo <= w_hi)) throw ConfigError("weight band must satisfy 0 < lo <= hi");
    const int n = dag.n_vars();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    Rng rng(seed);
    for (auto [i, j] : dag.edges()) {
        double mag = rng.uniform(w_lo, w_hi);
        double sign = 1.0;
        if (mixed_signs) sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        w(i, j) = sign * mag;
    }
    return LinearScm(dag, std::move(w), Eigen::VectorXd::Constant(n, noise));
}

namespace {

std::vector<int> topological_order(const Dag& dag) {
    const int n = dag.n_vars();
    std::vector<int> order;
    std::vector<bool> placed(static_cast<std::size_t>(n), false);
    // Smallest-index-first Kahn: deterministic order.
    for (int step = 0; step < n; ++step) {
        for (int v = 0; v < n; ++v) {
            if (placed[static_cast<std::size_t>(v)]) continue;
            bool ready = true;
            for (int p : dag.parents(v)) {
                if (!placed[static_cast<std::size_t>(p)]) {
                    ready = false;
                    break;
                }
            }
            if (ready) {
                placed[static_cast<std::size_t>(v)] = true;
                order.push_back(v);
                break;
            }
        }
    }
    return order;
}

std::vector<std::string> var_names(int n) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) names.push_back("V" + std::to_string(v));
    return names;
}

// One Gaussian draw from the stream keyed by (row, node): sampling is a pure
// function of (seed, row, node), independent of evaluation order.
double cell_noise(const Rng& base, int row, int node) {
    Rng cell = base.stream(static_cast<std::uint64_t>(row)).stream(static_cast<std::uint64_t>(node));
    return cell.normal();
}

}  // namespace

SeriesFrame sample_iid(const LinearScm& scm, int n_rows, std::uint64_t seed) {
    if (n_rows < 1) throw DataError("sample_iid needs n_rows >= 1");
    const int d = scm.dag.n_vars();
    if (d < 2) throw DataError("sampling needs at least 2 variables");
    Rng base(seed);
    std::vector<int> order = topological_order(scm.dag);
    SeriesFrame frame;
    frame.names = var_names(d);
    frame.values.resize(n_rows, d);
    for (int r = 0; r < n_rows; ++r) {
        for (int j : order) {
            double v = scm.noise_std(j) * cell_noise(base, r, j);
            for (int p : scm.dag.parents(j)) {
                v += scm.weights(p, j) * frame.values(r, p);
            }
            frame.values(r, j) = v;
        }
    }
    frame.validate();
    return frame;
}

SeriesFrame sample_lagged(const LinearScm& scm, int t_len, int lag, std::uint64_t seed, double ar) {
    if (lag < 1) throw DataError("sample_lagged needs lag >= 1");
    if (t_len <= lag) {
        throw DataError("sample_lagged needs t_len > lag (t_len=" + std::to_string(t_len) +
                        ", lag=" + std::to_string(lag) + ")");
    }
    const int d = scm.dag.n_vars();
    if (d < 2) throw DataError("sampling needs at least 2 variables");
    const int burn_in = 10 * lag;
    const int total = t_len + burn_in;
    Rng base(seed);
    Eigen::MatrixXd sim(total, d);
    for (int t = 0; t < total; ++t) {
        for (int j = 0; j < d; ++j) {
            double v = scm.noise_std(j) * cell_noise(base, t, j);
            if (t >= 1) v += ar * sim(t - 1, j);
            if (t >= lag) {
                for (int p : scm.dag.parents(j)) {
                    v += scm.weights(p, j) * sim(t - lag, p);
                }
            }
            sim(t, j) = v;
        }
    }
    SeriesFrame frame;
    frame.names = var_names(d);
    frame.values = sim.bottomRows(t_len);
    frame.validate();
    return frame;
}

Theorem1Result theorem1_check(int n, std::uint64_t seed, double gamma) {
    if (n < 1) throw DataError("theorem1_check needs n >= 1");
    // Collider model: V_i, V_s ~ N(0,1); V_c = V_i + V_s + N(0, 0.25).
    constexpr double w_i = 1.0;
    constexpr double w_s = 1.0;
    constexpr double sigma_c = 0.5;

    // Optimal predictor E[V_i | V_c, V_s] = a*V_c + b*V_s from the joint Gaussian.
    Eigen::Matrix2d cov_cs;
    cov_cs << w_i * w_i + w_s * w_s + sigma_c * sigma_c, w_s, w_s, 1.0;
    Eigen::Vector2d cov_i_cs(w_i, 0.0);
    Eigen::Vector2d coef = cov_cs.ldlt().solve(cov_i_cs);
    const double a = coef(0);
    const double b = coef(1);

    Rng base(seed);
    double sq_f = 0.0;
    double sq_psi = 0.0;
    double sq_phi = 0.0;
    for (int r = 0; r < n; ++r) {
        double vi = cell_noise(base, r, 0);
        double vs = cell_noise(base, r, 1);
        double vc = w_i * vi + w_s * vs + sigma_c * cell_noise(base, r, 2);
        double f_star = a * vc + b * vs;
        double f = f_star + gamma * vs;     // contaminated predictor
        double phi = gamma * vs;            // spouse component, exact by tower property
        double psi = f - phi;               // projected predictor
        sq_f += (vi - f) * (vi - f);
        sq_psi += (vi - psi) * (vi - psi);
        sq_phi += phi * phi;
    }
    Theorem1Result out;
    out.gap = (sq_f - sq_psi) / static_cast<double>(n);
    out.phi_norm_sq = sq_phi / static_cast<double>(n);
    return out;
}

}  // namespace causalts
