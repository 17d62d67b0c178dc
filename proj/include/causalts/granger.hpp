#ifndef CAUSALTS_GRANGER_HPP
#define CAUSALTS_GRANGER_HPP

#include <Eigen/Dense>

#include "causalts/series.hpp"

namespace causalts {

struct GrangerResult {
    // neg_log_p(m, n) = -ln p for the F-test of "m Granger-causes n".
    // Diagonal entries are 0 and masked.
    Eigen::MatrixXd neg_log_p;
    // 1 where the regression was near-singular and the entry was zeroed.
    Eigen::MatrixXi warnings;
    int lag = 0;
};

// Pairwise Granger causality screen: for each ordered pair (m, n), m != n, an
// F-test compares the restricted AR(lag) model of V_n against the model
// augmented with `lag` lags of V_m. Requires T > 2*lag + 10.
GrangerResult granger_matrix(const SeriesFrame& frame, int lag = 4);

}  // namespace causalts

#endif
