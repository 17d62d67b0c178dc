// Experiment harness: fixture structure, data preparation, variant wiring,
// config plumbing, and cheap smoke runs of the repeated-seed experiments.
// Quantitative orderings (which variant wins, robustness) are asserted by the
// acceptance binary under its pinned profiles, not here.
#include "doctest.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "causalts/cpdag.hpp"
#include "causalts/dag.hpp"
#include "causalts/errors.hpp"
#include "causalts/experiments.hpp"
#include "causalts/roles.hpp"
#include "causalts/runconfig.hpp"
#include "causalts/scm.hpp"

using namespace causalts;

namespace {

ExperimentConfig tiny_config() {
    ExperimentConfig e;
    e.rows = 120;
    e.obs_noise = 0.3;
    e.seeds = 1;
    e.base_seed = 0;
    e.lookback = 4;
    e.horizon = 1;
    e.dim = 8;
    e.enc_width = 8;
    e.epochs = 2;
    e.patience = 2;
    e.batch = 16;
    return e;
}

bool contains(const std::vector<int>& v, int x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("the benchmark system has the advertised causal anatomy") {
    const Dag dag = suite_dag();
    CHECK(dag.n_vars() == 7);
    const std::vector<std::pair<int, int>> want = {
        {0, 2}, {3, 2}, {3, 4}, {5, 0}, {6, 4}};
    CHECK(dag.edges() == want);

    // Target 0: parent 5, collider child 2, spouse 3, spurious {1, 4, 6}.
    const RoleSet r0 = oracle_roles(dag, 0);
    CHECK(r0.parents == std::vector<int>{5});
    CHECK(r0.colliders == std::vector<int>{2});
    CHECK(r0.spouses == std::vector<int>{3});
    CHECK(r0.spurious == std::vector<int>({1, 4, 6}));
    CHECK(r0.children.empty());  // 2 is claimed by the collider bucket

    const LinearScm scm = suite_scm();
    CHECK(scm.dag.edges() == want);

    // The isolated variable 1 really is disconnected.
    for (int i = 0; i < 7; ++i) {
        const RoleSet r = oracle_roles(dag, i);
        if (i != 1) CHECK(contains(r.spurious, 1));
    }
}

TEST_CASE("suite frames are deterministic and noise responds to the knob") {
    const SeriesFrame a = make_suite_frame(60, 9, 0.5);
    const SeriesFrame b = make_suite_frame(60, 9, 0.5);
    CHECK(a.values == b.values);
    CHECK(a.names.size() == 7);

    const SeriesFrame clean = make_suite_frame(60, 9, 0.0);
    CHECK(a.values != clean.values);

    // Same seed, same underlying latent draw: the observation noise is added
    // on top, so more noise means larger deviation from the clean series.
    const SeriesFrame loud = make_suite_frame(60, 9, 2.0);
    const double dev_mid = (a.values - clean.values).norm();
    const double dev_loud = (loud.values - clean.values).norm();
    CHECK(dev_mid > 0.0);
    CHECK(dev_loud > dev_mid);
}

TEST_CASE("the gap system puts a spouse behind target 0") {
    const Dag dag = gap_dag();
    CHECK(dag.n_vars() == 4);
    const RoleSet r0 = oracle_roles(dag, 0);
    CHECK(r0.colliders == std::vector<int>{2});
    CHECK(r0.spouses == std::vector<int>{1});
    const SeriesFrame f = make_gap_frame(80, 3, 0.2);
    CHECK(f.values.rows() == 80);
    CHECK(f.values.cols() == 4);
}

TEST_CASE("the predictive-asymmetry fixture is a directed pair") {
    const LinearScm scm = granger_scm();
    CHECK(scm.dag.n_vars() == 2);
    CHECK(scm.dag.edges() == std::vector<std::pair<int, int>>{{0, 1}});
    const SeriesFrame f = make_granger_frame(50, 1);
    CHECK(f.values.rows() == 50);
    CHECK(f.values.cols() == 2);
    CHECK(make_granger_frame(50, 1).values == f.values);
}

TEST_CASE("data preparation splits, normalizes and windows consistently") {
    const SeriesFrame frame = make_suite_frame(100, 5, 0.3);
    SplitSpec split;  // 0.6 / 0.2 / 0.2
    PreparedData prep = prepare_windows(frame, split, 4, 2, 1);

    CHECK(prep.names == frame.names);
    // 100 rows -> 60 / 20 / 20; windows: len - lookback - horizon + 1.
    CHECK(prep.train.size() == 60 - 4 - 2 + 1);
    CHECK(prep.val.size() == 20 - 4 - 2 + 1);
    CHECK(prep.test.size() == 20 - 4 - 2 + 1);
    CHECK(prep.train.n_vars() == 7);

    // The normalizer comes from the train split: train windows are z-scored,
    // so the earliest train history matches a by-hand transform.
    REQUIRE(prep.norm.fitted());
    const Eigen::RowVectorXd mean = prep.norm.mean();
    const Eigen::RowVectorXd std = prep.norm.std();
    Eigen::MatrixXd manual = frame.values.topRows(4);
    manual = (manual.rowwise() - mean).array().rowwise() / std.array();
    CHECK(prep.train.history(0).isApprox(manual, 1e-12));

    // Too little data for even one window in some split must fail loudly.
    CHECK_THROWS_AS(prepare_windows(make_suite_frame(20, 5, 0.3), split, 4, 2, 1),
                    DataError);
}

TEST_CASE("experiment knobs come straight from the run configuration") {
    RunConfig rc;
    rc.set_key("exp.rows", "960");
    rc.set_key("exp.obs_noise", "0.5");
    rc.set_key("exp.seeds", "3");
    rc.set_key("train.seed", "11");
    rc.set_key("window.lookback", "6");
    rc.set_key("window.horizon", "2");
    rc.set_key("window.stride", "2");
    rc.set_key("model.dim", "24");
    rc.set_key("model.enc_width", "12");
    rc.set_key("model.layers", "2");
    rc.set_key("model.heads", "2");
    rc.set_key("train.backbone", "mlp");
    rc.set_key("train.lr", "0.002");
    rc.set_key("train.batch", "16");
    rc.set_key("train.epochs", "30");
    rc.set_key("train.patience", "8");
    rc.set_key("train.lambda", "0.1");
    rc.set_key("adapter.alpha", "2");
    rc.set_key("adapter.beta", "3");

    const ExperimentConfig e = experiment_config(rc);
    CHECK(e.rows == 960);
    CHECK(e.obs_noise == 0.5);
    CHECK(e.seeds == 3);
    CHECK(e.base_seed == 11);
    CHECK(e.lookback == 6);
    CHECK(e.horizon == 2);
    CHECK(e.stride == 2);
    CHECK(e.dim == 24);
    CHECK(e.enc_width == 12);
    CHECK(e.layers == 2);
    CHECK(e.heads == 2);
    CHECK(e.backbone == "mlp");
    CHECK(e.lr == 0.002);
    CHECK(e.batch == 16);
    CHECK(e.epochs == 30);
    CHECK(e.patience == 8);
    CHECK(e.lambda == 0.1);
    CHECK(e.adapter_alpha == 2.0);
    CHECK(e.adapter_beta == 3.0);
}

TEST_CASE("variant configurations flip exactly the advertised switches") {
    const ExperimentConfig e = tiny_config();
    REQUIRE(kAblationVariants.size() == 6);
    CHECK(kAblationVariants[0] == "full");

    const ModelConfig full = variant_config(e, 7, "full");
    CHECK(full.n_vars == 7);
    CHECK(full.lookback == e.lookback);
    CHECK(full.horizon == e.horizon);
    CHECK(full.learn_logits);
    CHECK(full.use_prior);
    CHECK(full.use_dcs);
    CHECK(full.use_ccs);
    CHECK(full.segment_mask);
    CHECK(full.alpha == e.adapter_alpha);

    const ModelConfig stat = variant_config(e, 7, "static-prior");
    CHECK_FALSE(stat.learn_logits);
    CHECK(stat.use_prior);

    const ModelConfig rnd = variant_config(e, 7, "random-init");
    CHECK_FALSE(rnd.use_prior);
    CHECK(rnd.learn_logits);

    const ModelConfig nodcs = variant_config(e, 7, "w/o DCS");
    CHECK_FALSE(nodcs.use_dcs);
    CHECK(nodcs.use_ccs);

    const ModelConfig noccs = variant_config(e, 7, "w/o CCS");
    CHECK_FALSE(noccs.use_ccs);
    CHECK(noccs.use_dcs);

    const ModelConfig nomask = variant_config(e, 7, "w/o mask");
    CHECK_FALSE(nomask.segment_mask);
    CHECK(nomask.use_dcs);

    CHECK_THROWS_AS(variant_config(e, 7, "w/o everything"), ConfigError);
}

TEST_CASE("ablation smoke run: table shape, determinism, paired seeds") {
    const ExperimentConfig e = tiny_config();
    const std::vector<AblationRow> table = run_ablation(e);
    REQUIRE(table.size() == kAblationVariants.size());
    for (std::size_t v = 0; v < table.size(); ++v) {
        CHECK(table[v].variant == kAblationVariants[v]);
        REQUIRE(table[v].seed_mse.size() == 1);
        CHECK(table[v].mean_mse == table[v].seed_mse[0]);
        CHECK(table[v].mean_mse > 0.0);
        CHECK(table[v].mean_mae > 0.0);
    }
    const std::vector<AblationRow> again = run_ablation(e);
    for (std::size_t v = 0; v < table.size(); ++v) {
        CHECK(table[v].mean_mse == again[v].mean_mse);
    }
}

TEST_CASE("robustness smoke run: ratio zero reuses the clean prior") {
    ExperimentConfig e = tiny_config();
    const std::vector<RobustnessRow> rows =
        run_robustness(e, {0.0, 0.5}, PerturbMode::fn);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].ratio == 0.0);
    CHECK(rows[1].ratio == 0.5);
    for (const RobustnessRow& r : rows) {
        CHECK(r.mse_dca > 0.0);
        CHECK(r.mse_static > 0.0);
    }
    CHECK_THROWS_AS(run_robustness(e, {}, PerturbMode::fn), ConfigError);
    CHECK_THROWS_AS(run_robustness(e, {1.5}, PerturbMode::fn), ConfigError);
}

TEST_CASE("gap smoke run: both arms report train/test and their difference") {
    ExperimentConfig e = tiny_config();
    e.rows = 140;
    const GapResult g = run_gap_experiment(e);
    CHECK(g.gap_with == doctest::Approx(g.test_with - g.train_with).epsilon(1e-12));
    CHECK(g.gap_without ==
          doctest::Approx(g.test_without - g.train_without).epsilon(1e-12));
    CHECK(g.train_with > 0.0);
    CHECK(g.train_without > 0.0);
    CHECK_FALSE(g.history_with.empty());
    CHECK_FALSE(g.history_without.empty());
}

TEST_CASE("baseline comparison smoke run: restricted inputs stay restricted") {
    ExperimentConfig e = tiny_config();
    const BaselineComparisonResult r = run_baseline_comparison(e);
    CHECK(r.all_to_one_mse > 0.0);
    CHECK(r.all_to_all_mse > 0.0);
    REQUIRE(r.per_target_one.size() == 7);
    REQUIRE(r.per_target_all.size() == 7);
    CHECK(r.per_target_one.mean() ==
          doctest::Approx(r.all_to_one_mse).epsilon(1e-9));
    CHECK(r.per_target_all.mean() ==
          doctest::Approx(r.all_to_all_mse).epsilon(1e-9));

    // The externally-supplied-roles variant agrees with the oracle-roles one
    // when handed the same data and the true-graph roles.
    const SeriesFrame frame = make_suite_frame(e.rows, e.base_seed, e.obs_noise);
    std::vector<RoleSet> roles;
    for (int i = 0; i < 7; ++i) roles.push_back(oracle_roles(suite_dag(), i));
    const BaselineComparisonResult r2 = run_baseline_comparison_on(frame, roles, e);
    CHECK(r2.all_to_one_mse == r.all_to_one_mse);
    CHECK(r2.all_to_all_mse == r.all_to_all_mse);
}

}  // TEST_SUITE
