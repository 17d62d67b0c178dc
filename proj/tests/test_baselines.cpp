// Input-restricted baseline forecasters: mask construction from causal roles,
// bitwise zeroing of disallowed inputs, and evaluation bookkeeping.
#include "doctest.h"

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "causalts/baselines.hpp"
#include "causalts/dag.hpp"
#include "causalts/errors.hpp"
#include "causalts/roles.hpp"
#include "causalts/scm.hpp"
#include "causalts/series.hpp"
#include "causalts/train.hpp"

using namespace causalts;

namespace {

std::vector<RoleSet> roles_of(const Dag& dag) {
    std::vector<RoleSet> roles;
    for (int i = 0; i < dag.n_vars(); ++i) roles.push_back(oracle_roles(dag, i));
    return roles;
}

Eigen::MatrixXd det_history(int rows, int cols, std::uint64_t seed) {
    Eigen::MatrixXd m(rows, cols);
    std::uint64_t s = seed * 0x9e3779b97f4a7c15ULL + 1;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            m(r, c) = static_cast<double>(s % 2000) / 1000.0 - 1.0;
        }
    }
    return m;
}

BaselineConfig collider_config() {
    // 0 -> 2 <- 1: target 0 reads {0, collider 2} but not spouse 1.
    BaselineConfig cfg;
    cfg.n_vars = 3;
    cfg.lookback = 4;
    cfg.horizon = 2;
    cfg.hidden = 10;
    cfg.allowed = all_to_one_mask(roles_of(Dag(3, {{0, 2}, {1, 2}})), 3);
    return cfg;
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("the unrestricted mask lets every variable feed every target") {
    CHECK(all_to_all_mask(4) == Eigen::MatrixXi::Ones(4, 4));
}

TEST_CASE("the restricted mask keeps self, direct causes and colliders only") {
    // wind -> temperature -> precipitation <- pressure, wind -> humidity.
    const Dag dag(5, {{0, 1}, {1, 2}, {3, 2}, {0, 4}});
    const Eigen::MatrixXi allowed = all_to_one_mask(roles_of(dag), 5);

    Eigen::MatrixXi want(5, 5);
    // Column i lists what target i may read (allowed(j, i) = variable j).
    // target 0: self + children 1, 4 (no v-structure claims them)
    // target 1: self + parent 0 + collider 2; spouse 3 stays out
    // target 2: self + parents 1, 3
    // target 3: self + collider 2; spouse 1 stays out
    // target 4: self + parent 0
    want << 1, 1, 0, 0, 1,
            1, 1, 1, 0, 0,
            0, 1, 1, 1, 0,
            0, 0, 1, 1, 0,
            1, 0, 0, 0, 1;
    CHECK(allowed == want);

    CHECK_THROWS_AS(all_to_one_mask(roles_of(dag), 6), ConfigError);
}

TEST_CASE("configuration guards") {
    BaselineConfig cfg = collider_config();
    CHECK_NOTHROW(cfg.validate());
    auto bad = [&](auto mutate) {
        BaselineConfig c = collider_config();
        mutate(c);
        CHECK_THROWS_AS(c.validate(), ConfigError);
    };
    bad([](BaselineConfig& c) { c.n_vars = 1; });
    bad([](BaselineConfig& c) { c.lookback = 0; });
    bad([](BaselineConfig& c) { c.horizon = 0; });
    bad([](BaselineConfig& c) { c.hidden = 0; });
    bad([](BaselineConfig& c) { c.allowed = Eigen::MatrixXi::Ones(2, 2); });
    // A target with no inputs at all cannot forecast and is rejected.
    bad([](BaselineConfig& c) { c.allowed.col(1).setZero(); });
}

TEST_CASE("parameter inventory") {
    BaselineConfig cfg = collider_config();
    BaselineModel model(cfg, 3);
    const std::size_t in_dim = 3 * 4;
    const std::size_t per_target =
        in_dim * 10 + 10 + 10 * 2 + 2;  // w1 + b1 + w2 + b2
    CHECK(model.parameter_count() == 3 * per_target);
}

TEST_CASE("disallowed variables cannot influence a target, bitwise") {
    BaselineConfig cfg = collider_config();
    BaselineModel model(cfg, 7);

    Eigen::MatrixXd h = det_history(cfg.lookback, cfg.n_vars, 5);
    Eigen::MatrixXd h2 = h;
    h2.col(1).array() += 0.9;  // variable 1 is the spouse, hidden from target 0

    const Eigen::MatrixXd p1 = model.predict(h);
    const Eigen::MatrixXd p2 = model.predict(h2);
    REQUIRE(p1.rows() == cfg.horizon);
    REQUIRE(p1.cols() == cfg.n_vars);
    CHECK(p1.col(0) == p2.col(0));  // unchanged despite the input shift
    CHECK(p1.col(1) != p2.col(1));  // variable 1 reads itself
    CHECK(p1.col(2) != p2.col(2));  // parent of target 2

    // Shifting an allowed variable moves target 0 as well.
    Eigen::MatrixXd h3 = h;
    h3.col(2).array() += 0.9;
    CHECK(model.predict(h3).col(0) != p1.col(0));
}

TEST_CASE("per-target errors are consistent with the aggregate metrics") {
    SeriesFrame frame;
    frame.names = {"a", "b", "c"};
    frame.values = det_history(24, 3, 11);
    WindowSet windows = make_windows(frame, 4, 2, 2);
    REQUIRE(windows.size() >= 4);

    BaselineModel model(collider_config(), 13);
    const Eigen::VectorXd per_target = per_target_mse(model, windows);
    REQUIRE(per_target.size() == 3);

    // Recompute one target by hand.
    double sq = 0.0;
    std::int64_t n = 0;
    for (int k = 0; k < windows.size(); ++k) {
        Eigen::MatrixXd err = model.predict(windows.history(k)) - windows.future(k);
        sq += err.col(1).squaredNorm();
        n += err.rows();
    }
    CHECK(per_target(1) == doctest::Approx(sq / static_cast<double>(n)).epsilon(1e-12));

    // Equal entry counts per target: the overall MSE is the mean of the
    // per-target values.
    const EvalMetrics m = evaluate_baseline(model, windows);
    CHECK(m.mse == doctest::Approx(per_target.mean()).epsilon(1e-12));
    CHECK(m.mae > 0.0);
}

TEST_CASE("baseline training is deterministic and learns the pair fixture") {
    Dag dag(2, {{0, 1}});
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2, 2);
    w(0, 1) = 1.0;
    Eigen::VectorXd noise(2);
    noise << 1.0, 1.0;
    LinearScm scm(std::move(dag), std::move(w), std::move(noise));
    SeriesFrame frame = sample_lagged(scm, 160, 1, 17, 0.6);

    SeriesFrame tr_frame, va_frame;
    tr_frame.names = va_frame.names = frame.names;
    tr_frame.values = frame.values.topRows(120);
    va_frame.values = frame.values.bottomRows(40);
    WindowSet tr = make_windows(tr_frame, 4, 1, 1);
    WindowSet va = make_windows(va_frame, 4, 1, 1);

    BaselineConfig cfg;
    cfg.n_vars = 2;
    cfg.lookback = 4;
    cfg.horizon = 1;
    cfg.hidden = 16;
    cfg.allowed = all_to_all_mask(2);

    TrainConfig tc;
    tc.lr = 2e-3;
    tc.batch = 16;
    tc.max_epochs = 8;
    tc.patience = 8;
    tc.lambda = 0.0;
    tc.seed = 2;

    BaselineModel a(cfg, 19);
    BaselineModel b(cfg, 19);
    BaselineTrainResult ra = train_baseline(a, tr, va, tc);
    BaselineTrainResult rb = train_baseline(b, tr, va, tc);
    REQUIRE(ra.history.size() == rb.history.size());
    for (std::size_t e = 0; e < ra.history.size(); ++e) {
        CHECK(ra.history[e].train_mse == rb.history[e].train_mse);
        CHECK(ra.history[e].val_mse == rb.history[e].val_mse);
        CHECK(ra.history[e].reg == 0.0);
    }
    CHECK(ra.best_val_mse < ra.history.front().val_mse);
    CHECK(evaluate_baseline(a, va).mse == ra.best_val_mse);
}

}  // TEST_SUITE
