#ifndef CAUSALTS_SCM_HPP
#define CAUSALTS_SCM_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "causalts/dag.hpp"
#include "causalts/series.hpp"

namespace causalts {

// Linear-Gaussian structural causal model over a known DAG. weights(i, j) is
// the coefficient of the edge i -> j (zero elsewhere).
struct LinearScm {
    Dag dag;
    Eigen::MatrixXd weights;
    Eigen::VectorXd noise_std;

    LinearScm(Dag dag_in, Eigen::MatrixXd weights_in, Eigen::VectorXd noise_std_in);

    // Random edge weights with magnitudes in [w_lo, w_hi]; signs drawn uniformly
    // when mixed_signs is set. Unit noise everywhere by default.
    static LinearScm random(const Dag& dag, std::uint64_t seed, double w_lo = 0.5,
                            double w_hi = 2.0, double noise = 1.0, bool mixed_signs = true);
};

// i.i.d. rows via ancestral sampling: V_j = sum_i w_ij V_i + eps_j. Each row
// draws from its own counter-derived stream, so results are independent of
// evaluation order. Columns are named V0..V{D-1}.
SeriesFrame sample_iid(const LinearScm& scm, int n_rows, std::uint64_t seed);

// Lagged dynamics: V_j(t) = ar * V_j(t-1) + sum_i w_ij V_i(t-lag) + eps_j(t).
// A burn-in of 10*lag steps is simulated and discarded; missing history reads
// as zero. Requires t_len > lag >= 1.
SeriesFrame sample_lagged(const LinearScm& scm, int t_len, int lag, std::uint64_t seed,
                          double ar = 0.5);

struct Theorem1Result {
    double gap = 0.0;          // excess risk of f over its spouse-projected part
    double phi_norm_sq = 0.0;  // Monte-Carlo ||Phi f||^2
};

// Monte-Carlo witness of the projection identity on the collider model
// V_i -> V_c <- V_s: f = E[V_i | V_c, V_s] + gamma * V_s decomposes into the
// spouse component Phi f = gamma * V_s (exact, by the tower property) and the
// projected part Psi f = f - Phi f. The returned risk gap
// E[(V_i - f)^2] - E[(V_i - Psi f)^2] matches phi_norm_sq up to sampling noise
// and is non-negative.
Theorem1Result theorem1_check(int n, std::uint64_t seed, double gamma = 0.5);

}  // namespace causalts

#endif
