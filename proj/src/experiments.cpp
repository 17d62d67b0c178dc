#include "causalts/experiments.hpp"

#include <algorithm>
#include <utility>

#include "causalts/baselines.hpp"
#include "causalts/errors.hpp"
#include "causalts/rng.hpp"
#include "causalts/roles.hpp"

namespace causalts {

namespace {

constexpr std::uint64_t kObsNoiseStream = 0x0b5e72a1ULL;
constexpr std::uint64_t kModelSeedOffset = 0x51eedULL;

void add_observation_noise(SeriesFrame& frame, std::uint64_t seed, double obs_noise) {
    if (obs_noise <= 0.0) return;
    Rng base = Rng(seed).stream(kObsNoiseStream);
    for (Eigen::Index t = 0; t < frame.rows(); ++t) {
        Rng row = base.stream(static_cast<std::uint64_t>(t));
        for (Eigen::Index j = 0; j < frame.cols(); ++j) {
            frame.values(t, j) += obs_noise * row.stream(static_cast<std::uint64_t>(j)).normal();
        }
    }
}

TrainConfig make_train_config(const ExperimentConfig& e, std::uint64_t seed) {
    TrainConfig tc;
    tc.lr = e.lr;
    tc.batch = e.batch;
    tc.max_epochs = e.epochs;
    tc.patience = e.patience;
    tc.lambda = e.lambda;
    tc.seed = seed;
    return tc;
}

PriorMasks graph_priors(const Cpdag& g, int n_vars) {
    std::vector<RoleSet> roles;
    roles.reserve(static_cast<std::size_t>(n_vars));
    for (int i = 0; i < n_vars; ++i) roles.push_back(decompose(g, i));
    return prior_matrices(roles, n_vars);
}

}  // namespace

Dag suite_dag() {
    return Dag(7, {{5, 0}, {0, 2}, {3, 2}, {3, 4}, {6, 4}});
}

LinearScm suite_scm() {
    Dag d = suite_dag();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(7, 7);
    w(5, 0) = 1.2;
    w(0, 2) = 1.5;
    w(3, 2) = -0.7;
    w(3, 4) = 1.5;
    w(6, 4) = -0.7;
    // Collider children (2 and 4) get small structural noise so they act as
    // clean sensors of the heavy parent (0 and 3 respectively); the light
    // parent's contribution is interference the spouse projection can remove.
    // Low-variance roots 3 and 6 keep that interference small.
    Eigen::VectorXd noise(7);
    noise << 1.0, 1.0, 0.4, 0.6, 0.4, 1.0, 0.6;
    return LinearScm(std::move(d), std::move(w), std::move(noise));
}

// Persistent dynamics: with ar = 0.7 a variable's state carries across several
// steps, so a cross-column estimate of today's latent state still pays off at
// horizons beyond one.
constexpr double kSuiteAr = 0.7;

SeriesFrame make_suite_frame(int rows, std::uint64_t seed, double obs_noise) {
    SeriesFrame frame = sample_lagged(suite_scm(), rows, 1, seed, kSuiteAr);
    add_observation_noise(frame, seed, obs_noise);
    return frame;
}

Dag gap_dag() {
    return Dag(4, {{0, 2}, {1, 2}, {1, 3}});
}

LinearScm gap_scm() {
    Dag d = gap_dag();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
    w(0, 2) = 1.0;
    w(1, 2) = 1.0;
    w(1, 3) = 0.9;
    Eigen::VectorXd noise(4);
    noise << 1.0, 1.0, 0.5, 1.0;
    return LinearScm(std::move(d), std::move(w), std::move(noise));
}

SeriesFrame make_gap_frame(int rows, std::uint64_t seed, double obs_noise) {
    SeriesFrame frame = sample_lagged(gap_scm(), rows, 1, seed);
    add_observation_noise(frame, seed, obs_noise);
    return frame;
}

LinearScm granger_scm() {
    Dag d(2, {{0, 1}});
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2, 2);
    w(0, 1) = 1.0;
    return LinearScm(std::move(d), std::move(w), Eigen::VectorXd::Ones(2));
}

SeriesFrame make_granger_frame(int rows, std::uint64_t seed) {
    return sample_lagged(granger_scm(), rows, 1, seed);
}

PreparedData prepare_windows(const SeriesFrame& frame, const SplitSpec& split,
                             int lookback, int horizon, int stride) {
    SplitFrames parts = split_chrono(frame, split);
    Normalizer norm;
    norm.fit(parts.train);
    SeriesFrame train_n = norm.apply(parts.train);
    SeriesFrame val_n = norm.apply(parts.val);
    SeriesFrame test_n = norm.apply(parts.test);
    PreparedData prep{std::move(norm), frame.names,
                      make_windows(train_n, lookback, horizon, stride),
                      make_windows(val_n, lookback, horizon, stride),
                      make_windows(test_n, lookback, horizon, stride)};
    if (prep.train.size() < 1 || prep.val.size() < 1 || prep.test.size() < 1) {
        throw DataError("prepare_windows: a split is too short for the window shape");
    }
    return prep;
}

ExperimentConfig experiment_config(const RunConfig& rc) {
    ExperimentConfig e;
    e.rows = rc.exp_rows;
    e.obs_noise = rc.exp_obs_noise;
    e.seeds = rc.exp_seeds;
    e.base_seed = rc.seed;
    e.lookback = rc.lookback;
    e.horizon = rc.horizon;
    e.stride = rc.stride;
    e.dim = rc.model_dim;
    e.enc_width = rc.enc_width;
    e.layers = rc.layers;
    e.heads = rc.heads;
    e.backbone = rc.backbone;
    e.lr = rc.lr;
    e.batch = rc.batch;
    e.epochs = rc.epochs;
    e.patience = rc.patience;
    e.lambda = rc.lambda;
    e.adapter_alpha = rc.adapter_alpha;
    e.adapter_beta = rc.adapter_beta;
    return e;
}

const std::vector<std::string> kAblationVariants = {
    "full", "static-prior", "random-init", "w/o DCS", "w/o CCS", "w/o mask"};

ModelConfig variant_config(const ExperimentConfig& e, int n_vars,
                           const std::string& variant) {
    ModelConfig mc;
    mc.n_vars = n_vars;
    mc.lookback = e.lookback;
    mc.horizon = e.horizon;
    mc.dim = e.dim;
    mc.enc_width = e.enc_width;
    mc.layers = e.layers;
    mc.heads = e.heads;
    mc.backbone = e.backbone;
    mc.alpha = e.adapter_alpha;
    mc.beta = e.adapter_beta;
    if (variant == "full") {
        // defaults
    } else if (variant == "static-prior") {
        mc.learn_logits = false;
    } else if (variant == "random-init") {
        mc.use_prior = false;
    } else if (variant == "w/o DCS") {
        mc.use_dcs = false;
    } else if (variant == "w/o CCS") {
        mc.use_ccs = false;
    } else if (variant == "w/o mask") {
        mc.segment_mask = false;
    } else {
        throw ConfigError("unknown ablation variant: " + variant);
    }
    return mc;
}

std::vector<AblationRow> run_ablation(const ExperimentConfig& cfg) {
    const int n_vars = 7;
    const Cpdag truth = cpdag_of(suite_dag());
    const PriorMasks priors = graph_priors(truth, n_vars);

    std::vector<AblationRow> rows;
    for (const std::string& v : kAblationVariants) {
        AblationRow r;
        r.variant = v;
        rows.push_back(std::move(r));
    }

    std::vector<double> mae_sums(kAblationVariants.size(), 0.0);
    for (int s = 0; s < cfg.seeds; ++s) {
        const std::uint64_t data_seed = cfg.base_seed + static_cast<std::uint64_t>(s);
        SeriesFrame frame = make_suite_frame(cfg.rows, data_seed, cfg.obs_noise);
        PreparedData prep =
            prepare_windows(frame, SplitSpec{}, cfg.lookback, cfg.horizon, cfg.stride);
        const std::uint64_t model_seed =
            cfg.base_seed + kModelSeedOffset + static_cast<std::uint64_t>(s);
        for (std::size_t v = 0; v < kAblationVariants.size(); ++v) {
            ModelConfig mc = variant_config(cfg, n_vars, kAblationVariants[v]);
            ForecastModel model(mc, priors, model_seed);
            train(model, prep.train, prep.val, make_train_config(cfg, data_seed));
            EvalMetrics m = evaluate(model, prep.test);
            rows[v].seed_mse.push_back(m.mse);
            mae_sums[v] += m.mae;
        }
    }
    for (std::size_t v = 0; v < rows.size(); ++v) {
        double sum = 0.0;
        for (double m : rows[v].seed_mse) sum += m;
        rows[v].mean_mse = sum / static_cast<double>(cfg.seeds);
        rows[v].mean_mae = mae_sums[v] / static_cast<double>(cfg.seeds);
    }
    return rows;
}

std::vector<RobustnessRow> run_robustness(const ExperimentConfig& cfg,
                                          const std::vector<double>& ratios,
                                          PerturbMode mode) {
    if (ratios.empty()) throw ConfigError("run_robustness: no ratios given");
    const int n_vars = 7;
    const Cpdag truth = cpdag_of(suite_dag());

    std::vector<RobustnessRow> rows(ratios.size());
    for (std::size_t r = 0; r < ratios.size(); ++r) {
        if (ratios[r] < 0.0 || ratios[r] >= 1.0) {
            throw ConfigError("run_robustness: ratios must lie in [0, 1)");
        }
        rows[r].ratio = ratios[r];
    }

    for (int s = 0; s < cfg.seeds; ++s) {
        const std::uint64_t data_seed = cfg.base_seed + static_cast<std::uint64_t>(s);
        SeriesFrame frame = make_suite_frame(cfg.rows, data_seed, cfg.obs_noise);
        PreparedData prep =
            prepare_windows(frame, SplitSpec{}, cfg.lookback, cfg.horizon, cfg.stride);
        const std::uint64_t model_seed =
            cfg.base_seed + kModelSeedOffset + static_cast<std::uint64_t>(s);
        for (std::size_t r = 0; r < ratios.size(); ++r) {
            Cpdag graph = truth;
            if (ratios[r] > 0.0) {
                const std::uint64_t perturb_seed =
                    cfg.base_seed + 971ULL * static_cast<std::uint64_t>(s) +
                    static_cast<std::uint64_t>(r);
                graph = perturb(truth, mode, ratios[r], perturb_seed).graph;
            }
            const PriorMasks priors = graph_priors(graph, n_vars);
            {
                ModelConfig mc = variant_config(cfg, n_vars, "full");
                ForecastModel model(mc, priors, model_seed);
                train(model, prep.train, prep.val, make_train_config(cfg, data_seed));
                rows[r].mse_dca += evaluate(model, prep.test).mse;
            }
            {
                ModelConfig mc = variant_config(cfg, n_vars, "static-prior");
                ForecastModel model(mc, priors, model_seed);
                train(model, prep.train, prep.val, make_train_config(cfg, data_seed));
                rows[r].mse_static += evaluate(model, prep.test).mse;
            }
        }
    }
    for (RobustnessRow& row : rows) {
        row.mse_dca /= static_cast<double>(cfg.seeds);
        row.mse_static /= static_cast<double>(cfg.seeds);
    }
    return rows;
}

GapResult run_gap_experiment(const ExperimentConfig& cfg) {
    const int n_vars = 4;
    const Cpdag truth = cpdag_of(gap_dag());
    const PriorMasks priors = graph_priors(truth, n_vars);
    const int gap_rows = std::max(cfg.lookback + cfg.horizon + 40, cfg.rows / 2);

    GapResult out;
    for (int s = 0; s < cfg.seeds; ++s) {
        const std::uint64_t data_seed = cfg.base_seed + static_cast<std::uint64_t>(s);
        SeriesFrame frame = make_gap_frame(gap_rows, data_seed, cfg.obs_noise);
        PreparedData prep =
            prepare_windows(frame, SplitSpec{}, cfg.lookback, cfg.horizon, cfg.stride);
        const std::uint64_t model_seed =
            cfg.base_seed + kModelSeedOffset + static_cast<std::uint64_t>(s);
        for (bool with_projection : {true, false}) {
            ModelConfig mc = variant_config(cfg, n_vars, "full");
            mc.use_spouse_projection = with_projection;
            ForecastModel model(mc, priors, model_seed);
            TrainResult res =
                train(model, prep.train, prep.val, make_train_config(cfg, data_seed));
            const double train_mse = evaluate(model, prep.train).mse;
            const double test_mse = evaluate(model, prep.test).mse;
            if (with_projection) {
                out.train_with += train_mse;
                out.test_with += test_mse;
                if (s == 0) out.history_with = res.history;
            } else {
                out.train_without += train_mse;
                out.test_without += test_mse;
                if (s == 0) out.history_without = res.history;
            }
        }
    }
    const double n = static_cast<double>(cfg.seeds);
    out.train_with /= n;
    out.test_with /= n;
    out.train_without /= n;
    out.test_without /= n;
    out.gap_with = out.test_with - out.train_with;
    out.gap_without = out.test_without - out.train_without;
    return out;
}

namespace {

void baseline_pair_into(BaselineComparisonResult& out, const PreparedData& prep,
                        const Eigen::MatrixXi& one_mask, const Eigen::MatrixXi& all_mask,
                        const ExperimentConfig& cfg, std::uint64_t model_seed,
                        std::uint64_t train_seed) {
    const int n_vars = static_cast<int>(one_mask.rows());
    for (bool restricted : {true, false}) {
        BaselineConfig bc;
        bc.n_vars = n_vars;
        bc.lookback = cfg.lookback;
        bc.horizon = cfg.horizon;
        bc.hidden = 64;
        bc.allowed = restricted ? one_mask : all_mask;
        BaselineModel model(bc, model_seed);
        train_baseline(model, prep.train, prep.val, make_train_config(cfg, train_seed));
        const double mse = evaluate_baseline(model, prep.test).mse;
        const Eigen::VectorXd per_target = per_target_mse(model, prep.test);
        if (restricted) {
            out.all_to_one_mse += mse;
            out.per_target_one += per_target;
        } else {
            out.all_to_all_mse += mse;
            out.per_target_all += per_target;
        }
    }
}

void baseline_finish(BaselineComparisonResult& out, int seeds) {
    const double n = static_cast<double>(seeds);
    out.all_to_one_mse /= n;
    out.all_to_all_mse /= n;
    out.per_target_one /= n;
    out.per_target_all /= n;
}

}  // namespace

BaselineComparisonResult run_baseline_comparison(const ExperimentConfig& cfg) {
    const int n_vars = 7;
    const Cpdag truth = cpdag_of(suite_dag());
    std::vector<RoleSet> roles;
    for (int i = 0; i < n_vars; ++i) roles.push_back(decompose(truth, i));

    BaselineComparisonResult out;
    out.per_target_one = Eigen::VectorXd::Zero(n_vars);
    out.per_target_all = Eigen::VectorXd::Zero(n_vars);

    const Eigen::MatrixXi one_mask = all_to_one_mask(roles, n_vars);
    const Eigen::MatrixXi all_mask = all_to_all_mask(n_vars);

    for (int s = 0; s < cfg.seeds; ++s) {
        const std::uint64_t data_seed = cfg.base_seed + static_cast<std::uint64_t>(s);
        SeriesFrame frame = make_suite_frame(cfg.rows, data_seed, cfg.obs_noise);
        PreparedData prep =
            prepare_windows(frame, SplitSpec{}, cfg.lookback, cfg.horizon, cfg.stride);
        const std::uint64_t model_seed =
            cfg.base_seed + kModelSeedOffset + static_cast<std::uint64_t>(s);
        baseline_pair_into(out, prep, one_mask, all_mask, cfg, model_seed, data_seed);
    }
    baseline_finish(out, cfg.seeds);
    return out;
}

BaselineComparisonResult run_baseline_comparison_on(const SeriesFrame& frame,
                                                    const std::vector<RoleSet>& roles,
                                                    const ExperimentConfig& cfg) {
    const int n_vars = static_cast<int>(frame.cols());
    BaselineComparisonResult out;
    out.per_target_one = Eigen::VectorXd::Zero(n_vars);
    out.per_target_all = Eigen::VectorXd::Zero(n_vars);

    const Eigen::MatrixXi one_mask = all_to_one_mask(roles, n_vars);
    const Eigen::MatrixXi all_mask = all_to_all_mask(n_vars);
    PreparedData prep =
        prepare_windows(frame, SplitSpec{}, cfg.lookback, cfg.horizon, cfg.stride);

    for (int s = 0; s < cfg.seeds; ++s) {
        const std::uint64_t model_seed =
            cfg.base_seed + kModelSeedOffset + static_cast<std::uint64_t>(s);
        baseline_pair_into(out, prep, one_mask, all_mask, cfg, model_seed,
                           cfg.base_seed + static_cast<std::uint64_t>(s));
    }
    baseline_finish(out, cfg.seeds);
    return out;
}

}  // namespace causalts
