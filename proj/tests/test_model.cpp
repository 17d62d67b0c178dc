// Forecast model: configuration validation, parameter inventory, attention
// layouts, positional encoding, bitwise causality of the token stream, the
// ablation switches, and determinism of prediction.
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "causalts/dag.hpp"
#include "causalts/errors.hpp"
#include "causalts/model.hpp"
#include "causalts/roles.hpp"
#include "causalts/series.hpp"
#include "causalts/tape.hpp"

using namespace causalts;

namespace {

// Collider fixture 0 -> 2 <- 1: every mask (direct, collider, spouse) has at
// least one set entry, so all three adapters participate.
PriorMasks collider_priors() {
    Dag dag(3, {{0, 2}, {1, 2}});
    std::vector<RoleSet> roles;
    for (int i = 0; i < 3; ++i) roles.push_back(oracle_roles(dag, i));
    return prior_matrices(roles, 3);
}

ModelConfig small_config() {
    ModelConfig cfg;
    cfg.n_vars = 3;
    cfg.lookback = 4;
    cfg.horizon = 2;
    cfg.dim = 8;
    cfg.enc_width = 6;
    cfg.layers = 1;
    cfg.heads = 1;
    return cfg;
}

Eigen::MatrixXd deterministic_history(int rows, int cols, std::uint64_t seed) {
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

Eigen::MatrixXd* find_param(ForecastModel& model, const std::string& name) {
    for (ParamTensor& p : model.params()) {
        if (p.name == name) return &p.value;
    }
    return nullptr;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("configuration validation rejects out-of-range settings") {
    auto bad = [](auto mutate) {
        ModelConfig cfg;
        cfg.n_vars = 3;
        mutate(cfg);
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    };
    bad([](ModelConfig& c) { c.n_vars = 1; });
    bad([](ModelConfig& c) { c.lookback = 0; });
    bad([](ModelConfig& c) { c.horizon = 0; });
    bad([](ModelConfig& c) { c.dim = 0; });
    bad([](ModelConfig& c) { c.enc_width = 0; });
    bad([](ModelConfig& c) { c.layers = 0; });
    bad([](ModelConfig& c) { c.heads = 0; });
    bad([](ModelConfig& c) { c.dim = 8; c.heads = 3; });  // heads must divide dim
    bad([](ModelConfig& c) { c.ffn_mult = 0; });
    bad([](ModelConfig& c) { c.backbone = "rnn"; });
    bad([](ModelConfig& c) { c.alpha = std::numeric_limits<double>::infinity(); });
    ModelConfig ok;
    ok.n_vars = 2;
    CHECK_NOTHROW(ok.validate());
}

TEST_CASE("parameter inventory matches an independent count") {
    ModelConfig cfg = small_config();
    cfg.layers = 2;
    cfg.heads = 2;
    ForecastModel model(cfg, collider_priors(), 7);

    const std::size_t D = 3, d = 8, w = 6, s = 2;
    // Shared encoder: 1->w, w->w, w->d, each with a bias row.
    std::size_t expected = (1 * w + w) + (w * w + w) + (w * d + d);
    // Three projection heads d->d with bias.
    expected += 3 * (d * d + d);
    // Three adapter logit matrices, D x D.
    expected += 3 * D * D;
    // Per transformer layer: 2 layer norms, q/k/v/o projections (no key bias:
    // softmax ignores a per-row constant shift, so one would be dead weight),
    // and the 4x FFN.
    const std::size_t per_layer =
        2 * d + 4 * d * d + 3 * d + 2 * d + (d * 4 * d + 4 * d) + (4 * d * d + d);
    expected += 2 * per_layer;
    // Final layer norm, prediction head d->s, spouse head (s+d)->d->s.
    expected += 2 * d;
    expected += d * s + s;
    expected += (s + d) * d + d + d * s + s;

    CHECK(model.parameter_count(false) == expected);
    CHECK(model.parameter_count(true) == expected);  // everything trainable

    cfg.learn_logits = false;
    ForecastModel frozen(cfg, collider_priors(), 7);
    CHECK(frozen.parameter_count(false) == expected);
    CHECK(frozen.parameter_count(true) == expected - 3 * D * D);

    std::set<std::string> names;
    for (const ParamTensor& p : model.params()) names.insert(p.name);
    CHECK(names.size() == model.params().size());  // names are unique
}

TEST_CASE("segment mask layout") {
    for (int t_len : {1, 2, 8}) {
        CAPTURE(t_len);
        const Eigen::MatrixXi allow = ForecastModel::build_segment_mask(t_len);
        const int n = 3 * t_len;
        REQUIRE(allow.rows() == n);
        REQUIRE(allow.cols() == n);
        for (int r = 0; r < n; ++r) {
            const int seg_r = r / t_len;
            const int time_r = r % t_len;
            for (int c = 0; c < n; ++c) {
                const int seg_c = c / t_len;
                const int time_c = c % t_len;
                // Context segments (0, 1) are causal within themselves only;
                // the own-history segment (2) reads every segment causally.
                int want = 0;
                if (seg_r < 2) {
                    want = (seg_c == seg_r && time_c <= time_r) ? 1 : 0;
                } else {
                    want = (time_c <= time_r) ? 1 : 0;
                }
                CHECK(allow(r, c) == want);
            }
            CHECK(allow(r, r) == 1);
            const int row_sum = allow.row(r).sum();
            CHECK(row_sum == (seg_r < 2 ? time_r + 1 : 3 * (time_r + 1)));
        }
    }
}

TEST_CASE("plain causal mask is lower triangular") {
    const Eigen::MatrixXi allow = ForecastModel::causal_mask(5);
    for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 5; ++c) CHECK(allow(r, c) == (c <= r ? 1 : 0));
    }
}

TEST_CASE("positional encoding restarts per segment") {
    ModelConfig cfg = small_config();
    ForecastModel restart(cfg, collider_priors(), 1);
    const Eigen::MatrixXd& pe = restart.positional_encoding();
    const int t_len = cfg.lookback;
    REQUIRE(pe.rows() == 3 * t_len);
    REQUIRE(pe.cols() == cfg.dim);
    for (int r = 0; r < 3 * t_len; ++r) {
        CHECK(pe.row(r) == pe.row(r % t_len));  // segments share the code
    }
    // Position zero is the canonical sin/cos anchor.
    for (int j = 0; j < cfg.dim; ++j) {
        CHECK(pe(0, j) == (j % 2 == 0 ? 0.0 : 1.0));
    }

    cfg.pe_restart = false;
    ForecastModel linear(cfg, collider_priors(), 1);
    const Eigen::MatrixXd& pl = linear.positional_encoding();
    CHECK(pl.row(t_len) != pl.row(0));  // continuous positions do not repeat
    CHECK(pl.topRows(t_len) == pe.topRows(t_len));
}

TEST_CASE("earlier stream tokens are bitwise independent of later inputs") {
    ModelConfig cfg = small_config();
    cfg.layers = 2;  // independence must survive stacked attention
    ForecastModel model(cfg, collider_priors(), 11);
    const int t_len = cfg.lookback;

    Eigen::MatrixXd h = deterministic_history(t_len, cfg.n_vars, 3);
    Eigen::MatrixXd h_late = h;
    h_late(t_len - 1, 1) += 0.7;  // perturb only the final time step

    for (int target = 0; target < cfg.n_vars; ++target) {
        CAPTURE(target);
        Tape ta, tb;
        ForecastModel::Bound ba = model.bind(ta, false);
        ForecastModel::Bound bb = model.bind(tb, false);
        const Eigen::MatrixXd sa = ta.val(model.encode_stream(ta, ba, h, target));
        const Eigen::MatrixXd sb = tb.val(model.encode_stream(tb, bb, h_late, target));
        for (int seg = 0; seg < 3; ++seg) {
            for (int time = 0; time < t_len - 1; ++time) {
                CHECK(sa.row(seg * t_len + time) == sb.row(seg * t_len + time));
            }
        }
        // The final own-history token does see the change.
        CHECK(sa.row(3 * t_len - 1) != sb.row(3 * t_len - 1));
    }
}

TEST_CASE("shared encoder is pointwise per scalar") {
    ModelConfig cfg = small_config();
    ForecastModel model(cfg, collider_priors(), 5);
    const int t_len = cfg.lookback;

    Eigen::MatrixXd h = deterministic_history(t_len, cfg.n_vars, 9);
    const Eigen::MatrixXd base = model.encode_tokens(h);
    REQUIRE(base.rows() == cfg.n_vars * t_len);
    REQUIRE(base.cols() == cfg.dim);

    auto poke = [&](int time, int var) {
        Eigen::MatrixXd hp = h;
        hp(time, var) += 0.3;
        const Eigen::MatrixXd tokens = model.encode_tokens(hp);
        const int moved = var * t_len + time;  // variable-major block layout
        for (int r = 0; r < base.rows(); ++r) {
            if (r == moved) {
                CHECK(tokens.row(r) != base.row(r));
            } else {
                CHECK(tokens.row(r) == base.row(r));
            }
        }
    };
    poke(0, 0);
    poke(2, 1);
    poke(t_len - 1, 2);
}

TEST_CASE("fully suppressed direct-cause gates equal removing the pathway") {
    ModelConfig cfg = small_config();
    ForecastModel with_dcs(cfg, collider_priors(), 21);
    // Drive every direct-cause gate to exactly zero.
    Eigen::MatrixXd* logits = find_param(with_dcs, "adapter.direct");
    REQUIRE(logits != nullptr);
    logits->setConstant(-1e9);

    ModelConfig no_dcs = cfg;
    no_dcs.use_dcs = false;
    ForecastModel without(no_dcs, collider_priors(), 21);  // same seed, same params

    const Eigen::MatrixXd h = deterministic_history(cfg.lookback, cfg.n_vars, 13);
    CHECK(with_dcs.predict(h) == without.predict(h));  // bitwise
}

TEST_CASE("attention layout override is wired into the backbone") {
    const Eigen::MatrixXd h = deterministic_history(4, 3, 17);

    SUBCASE("two stacked layers expose the mask through the readout") {
        ModelConfig cfg = small_config();
        cfg.layers = 2;
        ForecastModel model(cfg, collider_priors(), 31);
        const Eigen::MatrixXd before = model.predict(h);
        model.override_attention_mask(
            Eigen::MatrixXi::Ones(3 * cfg.lookback, 3 * cfg.lookback));
        CHECK(model.predict(h) != before);
    }

    SUBCASE("mean readout exposes the mask even with one layer") {
        ModelConfig cfg = small_config();
        cfg.readout_mean = true;
        ForecastModel model(cfg, collider_priors(), 31);
        const Eigen::MatrixXd before = model.predict(h);
        model.override_attention_mask(
            Eigen::MatrixXi::Ones(3 * cfg.lookback, 3 * cfg.lookback));
        CHECK(model.predict(h) != before);
    }

    SUBCASE("one layer with last-row readout is mask-blind by construction") {
        // The readout row may already attend to every token, and no other row
        // feeds the forecast after a single layer, so widening the layout
        // cannot change the output. Mask-sensitivity probes must therefore
        // stack layers or use the mean readout.
        ModelConfig cfg = small_config();
        ForecastModel model(cfg, collider_priors(), 31);
        const Eigen::MatrixXd before = model.predict(h);
        model.override_attention_mask(
            Eigen::MatrixXi::Ones(3 * cfg.lookback, 3 * cfg.lookback));
        CHECK(model.predict(h) == before);
    }

    SUBCASE("the mlp backbone has no attention to override") {
        ModelConfig cfg = small_config();
        cfg.backbone = "mlp";
        cfg.layers = 2;
        ForecastModel model(cfg, collider_priors(), 31);
        const Eigen::MatrixXd before = model.predict(h);
        model.override_attention_mask(
            Eigen::MatrixXi::Ones(3 * cfg.lookback, 3 * cfg.lookback));
        CHECK(model.predict(h) == before);
    }

    SUBCASE("a layout of the wrong shape is rejected") {
        ModelConfig cfg = small_config();
        ForecastModel model(cfg, collider_priors(), 31);
        CHECK_THROWS_AS(model.override_attention_mask(Eigen::MatrixXi::Ones(4, 4)),
                        ConfigError);
    }
}

TEST_CASE("gate matrices reflect the prior at initialization") {
    ModelConfig cfg = small_config();
    cfg.alpha = 2.0;
    cfg.beta = 3.0;
    const PriorMasks priors = collider_priors();
    ForecastModel model(cfg, priors, 3);

    const AdapterInit logits = init_logits(priors, cfg.alpha, cfg.beta);
    auto sig = [](const Eigen::MatrixXd& m) {
        return Eigen::MatrixXd(
            m.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); }));
    };
    CHECK(model.gate_matrix("dcs").isApprox(sig(logits.dcs), 1e-12));
    CHECK(model.gate_matrix("ccs").isApprox(sig(logits.ccs), 1e-12));
    CHECK(model.gate_matrix("sp").isApprox(sig(logits.sp), 1e-12));

    // Spot values: on-prior entries sit at sigmoid(alpha), everything else at
    // sigmoid(-beta). For target 2 both 0 and 1 are direct causes.
    const double on = 1.0 / (1.0 + std::exp(-2.0));
    const double off = 1.0 / (1.0 + std::exp(3.0));
    const Eigen::MatrixXd gd = model.gate_matrix("dcs");
    CHECK(gd(0, 2) == doctest::Approx(on).epsilon(1e-12));
    CHECK(gd(1, 2) == doctest::Approx(on).epsilon(1e-12));
    CHECK(gd(2, 2) == doctest::Approx(off).epsilon(1e-12));

    CHECK_THROWS_AS(model.gate_matrix("nope"), ConfigError);

    cfg.use_prior = false;
    ForecastModel flat(cfg, priors, 3);
    CHECK(flat.gate_matrix("dcs").isApproxToConstant(0.5, 1e-15));
}

TEST_CASE("a zeroed spouse head leaves the raw forecast untouched") {
    ModelConfig cfg = small_config();
    ForecastModel corrected(cfg, collider_priors(), 41);
    for (const char* name :
         {"spouse_head.w1", "spouse_head.b1", "spouse_head.w2", "spouse_head.b2"}) {
        Eigen::MatrixXd* p = find_param(corrected, name);
        REQUIRE(p != nullptr);
        p->setZero();
    }

    ModelConfig raw_cfg = cfg;
    raw_cfg.use_spouse_projection = false;
    ForecastModel raw(raw_cfg, collider_priors(), 41);

    const Eigen::MatrixXd h = deterministic_history(cfg.lookback, cfg.n_vars, 19);
    CHECK(corrected.predict(h) == raw.predict(h));
}

TEST_CASE("readout modes give different forecasts") {
    ModelConfig cfg = small_config();
    ForecastModel last_row(cfg, collider_priors(), 51);
    cfg.readout_mean = true;
    ForecastModel mean_row(cfg, collider_priors(), 51);
    const Eigen::MatrixXd h = deterministic_history(cfg.lookback, cfg.n_vars, 23);
    CHECK(last_row.predict(h) != mean_row.predict(h));
}

TEST_CASE("prediction is deterministic and seed-sensitive") {
    ModelConfig cfg = small_config();
    const Eigen::MatrixXd h = deterministic_history(cfg.lookback, cfg.n_vars, 29);

    ForecastModel a(cfg, collider_priors(), 61);
    const Eigen::MatrixXd p1 = a.predict(h);
    const Eigen::MatrixXd p2 = a.predict(h);
    REQUIRE(p1.rows() == cfg.horizon);
    REQUIRE(p1.cols() == cfg.n_vars);
    CHECK(p1 == p2);  // repeat is bitwise identical

    ForecastModel twin(cfg, collider_priors(), 61);
    CHECK(twin.predict(h) == p1);  // same seed, same weights

    ForecastModel other(cfg, collider_priors(), 62);
    CHECK(other.predict(h) != p1);
}

TEST_CASE("loss averages windows uniformly and validates its inputs") {
    ModelConfig cfg = small_config();
    ForecastModel model(cfg, collider_priors(), 71);

    SeriesFrame frame;
    frame.names = {"a", "b", "c"};
    frame.values = deterministic_history(12, 3, 37);
    WindowSet windows = make_windows(frame, cfg.lookback, cfg.horizon, 1);
    REQUIRE(windows.size() >= 2);

    auto mse_of = [&](const std::vector<int>& order) {
        Tape t;
        ForecastModel::Bound b = model.bind(t, false);
        return model.loss(t, b, windows, order, 0.0).mse;
    };
    const double joint = mse_of({0, 1});
    const double split = 0.5 * (mse_of({0}) + mse_of({1}));
    CHECK(joint == doctest::Approx(split).epsilon(1e-9));

    Tape t;
    ForecastModel::Bound b = model.bind(t, false);
    CHECK_THROWS_AS(model.loss(t, b, windows, {}, 0.0), DataError);
    CHECK_THROWS_AS(model.loss(t, b, windows, {windows.size()}, 0.0), DataError);

    WindowSet wrong = make_windows(frame, cfg.lookback - 1, cfg.horizon, 1);
    CHECK_THROWS_AS(model.loss(t, b, wrong, {0}, 0.0), DataError);

    // The adapter regularizer only enters with a prior and a nonzero weight.
    Tape t2;
    ForecastModel::Bound b2 = model.bind(t2, false);
    ForecastModel::LossParts parts = model.loss(t2, b2, windows, {0, 1}, 0.1);
    CHECK(parts.reg > 0.0);
    CHECK(t2.val(parts.total)(0, 0) ==
          doctest::Approx(parts.mse + 0.1 * parts.reg).epsilon(1e-12));
}

TEST_CASE("shape guards on forward inputs") {
    ModelConfig cfg = small_config();
    ForecastModel model(cfg, collider_priors(), 81);
    Tape t;
    ForecastModel::Bound b = model.bind(t, false);
    CHECK_THROWS_AS(model.encode_stream(t, b, deterministic_history(4, 3, 1), 3),
                    DataError);
    CHECK_THROWS_AS(model.encode_stream(t, b, deterministic_history(3, 3, 1), 0),
                    DataError);
    CHECK_THROWS_AS(model.predict(deterministic_history(4, 2, 1)), DataError);
}

}  // TEST_SUITE
