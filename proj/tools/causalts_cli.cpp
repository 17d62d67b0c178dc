// causalts command-line pipeline.
//
// Subcommands: synth, discover, granger, decompose, train, eval, perturb,
// ablate, gapexp. Every run reads an optional `key = value` config file,
// applies flag overrides, writes the fully resolved config and a JSON manifest
// (input/output content hashes, no timestamps) next to its outputs, and is
// byte-identical when re-run with the same config and seed.
//
// Exit codes: 0 ok, 2 config error, 3 data error, 4 numeric divergence,
// 5 missing upstream artifact. Failures print one line to stderr:
//   error: <class>: <message>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "causalts/artifacts.hpp"
#include "causalts/checkpoint.hpp"
#include "causalts/ci.hpp"
#include "causalts/cpdag.hpp"
#include "causalts/csv.hpp"
#include "causalts/errors.hpp"
#include "causalts/experiments.hpp"
#include "causalts/granger.hpp"
#include "causalts/model.hpp"
#include "causalts/pc.hpp"
#include "causalts/roles.hpp"
#include "causalts/runconfig.hpp"
#include "causalts/scm.hpp"
#include "causalts/series.hpp"
#include "causalts/train.hpp"

namespace fs = std::filesystem;
using namespace causalts;

namespace {

// ---------------------------------------------------------------------------
// Shared option plumbing

struct CommonFlags {
    std::string config_path;
    std::vector<std::string> sets;  // key=value overrides, applied in order
    std::string data_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool data_given = false;
    bool out_given = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "Path to a key = value config file");
    cmd->add_option("--set", f.sets,
                    "Override a config key, e.g. --set train.lr=0.01 (repeatable)");
    cmd->add_option("--data", f.data_path, "Override data.path")
        ->each([&f](const std::string&) { f.data_given = true; });
    cmd->add_option("--out", f.out_dir, "Override out.dir")
        ->each([&f](const std::string&) { f.out_given = true; });
    cmd->add_option("--seed", f.seed, "Override train.seed")
        ->each([&f](const std::string&) { f.seed_given = true; });
}

RunConfig resolve_config(const CommonFlags& f) {
    RunConfig cfg;
    if (!f.config_path.empty()) cfg = RunConfig::from_file(f.config_path);
    for (const std::string& kv : f.sets) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got: " + kv);
        std::string key = kv.substr(0, eq);
        std::string value = kv.substr(eq + 1);
        auto trim = [](std::string& s) {
            const std::size_t b = s.find_first_not_of(" \t");
            const std::size_t e = s.find_last_not_of(" \t");
            s = (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(value);
        cfg.set_key(key, value);
    }
    if (f.data_given) cfg.data_path = f.data_path;
    if (f.out_given) cfg.out_dir = f.out_dir;
    if (f.seed_given) cfg.seed = f.seed;
    cfg.validate();
    return cfg;
}

// One run's output bookkeeping: resolved config + manifest under out.dir.
struct RunContext {
    RunContext(const std::string& command, const RunConfig& cfg, const CommonFlags& flags)
        : cfg_(cfg), command_(command), manifest_(command, cfg.seed) {
        fs::create_directories(cfg.out_dir);
        if (!flags.config_path.empty())
            manifest_.add_input(flags.config_path, flags.config_path);
        const std::string resolved = out_path(command + "_config.txt");
        cfg_.write(resolved);
        manifest_.add_output(resolved, resolved);
    }

    std::string out_path(const std::string& name) const {
        return (fs::path(cfg_.out_dir) / name).string();
    }

    void input(const std::string& path) { manifest_.add_input(path, path); }
    void output(const std::string& path) { manifest_.add_output(path, path); }

    // Writes <command>_manifest.json; call once, after all outputs exist.
    void finish() { manifest_.write(out_path(command_ + "_manifest.json")); }

    const RunConfig& cfg() const { return cfg_; }

private:
    RunConfig cfg_;
    std::string command_;
    Manifest manifest_;
};

// ---------------------------------------------------------------------------
// Small output helpers

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    return out;
}

void write_history_csv(const std::string& path, const std::vector<EpochStats>& history) {
    std::ofstream out = open_out(path);
    out << "epoch,train_mse,val_mse,reg\n";
    for (const EpochStats& e : history) {
        out << e.epoch << ',' << format_double(e.train_mse) << ','
            << format_double(e.val_mse) << ',' << format_double(e.reg) << '\n';
    }
}

// Square matrix with variable names on both axes (granger screen, gate heatmaps).
void write_labeled_square(const std::string& path, const Eigen::MatrixXd& m,
                          const std::vector<std::string>& names) {
    write_matrix_csv(path, m, names, names, "variable");
}

// The true generating DAG rendered in the shared adjacency coding (every edge
// directed), so downstream commands can consume it like any estimated graph.
Cpdag directed_graph(const Dag& dag) {
    Cpdag g(dag.n_vars());
    for (const auto& [i, j] : dag.edges()) g.set_directed(i, j);
    return g;
}

SeriesFrame load_data(const RunConfig& cfg) {
    if (cfg.data_path.empty())
        throw ConfigError("data.path is required for this command");
    if (!fs::exists(cfg.data_path))
        throw MissingArtifactError("data file not found: " + cfg.data_path);
    return load_csv(cfg.data_path);
}

const SeriesFrame& pick_split(const SplitFrames& s, const std::string& name) {
    if (name == "train") return s.train;
    if (name == "val") return s.val;
    return s.test;
}

std::vector<RoleSet> all_roles(const Cpdag& g) {
    std::vector<RoleSet> roles;
    roles.reserve(static_cast<std::size_t>(g.n_vars()));
    for (int t = 0; t < g.n_vars(); ++t) roles.push_back(decompose(g, t));
    return roles;
}

Cpdag discover_graph(const SeriesFrame& frame, double alpha) {
    FisherZTest ci(frame, alpha);
    return pc(ci);
}

// ---------------------------------------------------------------------------
// synth: sample a synthetic system to data.csv + graph_true.csv

struct SynthFlags {
    std::string dag = "suite";    // suite | collider | pair
    std::string mode = "lagged";  // lagged | iid
    int n = 0;                    // 0: use exp.rows
    double obs_noise = -1.0;      // <0: use exp.obs_noise
};

int run_synth(const CommonFlags& common, const SynthFlags& sf) {
    RunConfig cfg = resolve_config(common);
    RunContext ctx("synth", cfg, common);

    const int rows = sf.n > 0 ? sf.n : cfg.exp_rows;
    const double obs_noise = sf.obs_noise >= 0.0 ? sf.obs_noise : cfg.exp_obs_noise;
    if (rows < 2) throw ConfigError("synth needs at least 2 rows");

    LinearScm scm = sf.dag == "suite"      ? suite_scm()
                    : sf.dag == "collider" ? gap_scm()
                                           : granger_scm();
    SeriesFrame frame =
        sf.mode == "iid"
            ? sample_iid(scm, rows, cfg.seed)
            : (sf.dag == "suite"      ? make_suite_frame(rows, cfg.seed, obs_noise)
               : sf.dag == "collider" ? make_gap_frame(rows, cfg.seed, obs_noise)
                                      : make_granger_frame(rows, cfg.seed));

    const std::string data_path = ctx.out_path("data.csv");
    const std::string graph_path = ctx.out_path("graph_true.csv");
    save_csv(frame, data_path);
    write_graph_csv(directed_graph(scm.dag), frame.names, graph_path);
    ctx.output(data_path);
    ctx.output(graph_path);
    ctx.finish();
    std::cout << "synth: " << rows << " rows x " << frame.cols() << " vars ("
              << sf.dag << ", " << sf.mode << ") -> " << data_path << "\n";
    return exit_code::ok;
}

// ---------------------------------------------------------------------------
// discover: constraint-based graph search on the data -> graph.csv

int run_discover(const CommonFlags& common, const std::string& split) {
    RunConfig cfg = resolve_config(common);
    RunContext ctx("discover", cfg, common);

    SeriesFrame frame = load_data(cfg);
    ctx.input(cfg.data_path);
    Cpdag g(static_cast<int>(frame.cols()));
    std::vector<std::string> names = frame.names;
    if (split == "all") {
        g = discover_graph(frame, cfg.pc_alpha);
    } else {
        SplitFrames parts = split_chrono(frame, cfg.split);
        g = discover_graph(pick_split(parts, split), cfg.pc_alpha);
    }

    const std::string graph_path = ctx.out_path("graph.csv");
    write_graph_csv(g, names, graph_path);
    ctx.output(graph_path);
    ctx.finish();
    std::cout << "discover: " << g.skeleton_edges().size() << " skeleton edges, "
              << g.directed_edge_list().size() << " directed (split=" << split
              << ") -> " << graph_path << "\n";
    return exit_code::ok;
}

// ---------------------------------------------------------------------------
// granger: pairwise predictive-asymmetry screen -> granger.csv

int run_granger(const CommonFlags& common) {
    RunConfig cfg = resolve_config(common);
    RunContext ctx("granger", cfg, common);

    SeriesFrame frame = load_data(cfg);
    ctx.input(cfg.data_path);
    GrangerResult res = granger_matrix(frame, cfg.granger_lag);

    const std::string path = ctx.out_path("granger.csv");
    write_labeled_square(path, res.neg_log_p, frame.names);
    ctx.output(path);
    ctx.finish();
    std::cout << "granger: lag " << res.lag << ", " << frame.cols()
              << " vars -> " << path << "\n";
    return exit_code::ok;
}

// ---------------------------------------------------------------------------
// decompose: per-target causal roles of a graph -> roles.csv

int run_decompose(const CommonFlags& common, std::string graph_path) {
    RunConfig cfg = resolve_config(common);
    RunContext ctx("decompose", cfg, common);

    if (graph_path.empty()) graph_path = ctx.out_path("graph.csv");
    if (!fs::exists(graph_path))
        throw MissingArtifactError("graph file not found: " + graph_path);
    ctx.input(graph_path);

    std::vector<std::string> names;
    Cpdag g = read_graph_csv(graph_path, &names);

    const std::string roles_path = ctx.out_path("roles.csv");
    {
        std::ofstream out = open_out(roles_path);
        out << "target,variable,role\n";
        for (int t = 0; t < g.n_vars(); ++t) {
            RoleSet roles = decompose(g, t);
            for (int v = 0; v < g.n_vars(); ++v) {
                if (v == t) continue;
                out << names[static_cast<std::size_t>(t)] << ','
                    << names[static_cast<std::size_t>(v)] << ','
                    << role_name(roles, v) << '\n';
            }
        }
    }
    ctx.output(roles_path);
    ctx.finish();
    std::cout << "decompose: " << g.n_vars() << " targets -> " << roles_path << "\n";
    return exit_code::ok;
}

// ---------------------------------------------------------------------------
// train: fit the forecaster -> checkpoint.txt, loss_history.csv, gate heatmaps

int run_train(const CommonFlags& common, const std::string& graph_flag, bool graph_given) {
    RunConfig cfg = resolve_config(common);
    RunContext ctx("train", cfg, common);

    SeriesFrame frame = load_data(cfg);
    ctx.input(cfg.data_path);
    const int n_vars = static_cast<int>(frame.cols());

    // Priors come from a graph file when one exists; otherwise discovery runs
    // inline on the training split (never the held-out rows) and the estimate
    // is written out like a `discover` run would.
    std::string graph_path = graph_given ? graph_flag : ctx.out_path("graph.csv");
    Cpdag g(n_vars);
    if (fs::exists(graph_path)) {
        std::vector<std::string> names;
        g = read_graph_csv(graph_path, &names);
        if (g.n_vars() != n_vars)
            throw DataError("graph has " + std::to_string(g.n_vars()) +
                            " variables but data has " + std::to_string(n_vars));
        ctx.input(graph_path);
    } else if (graph_given) {
        throw MissingArtifactError("graph file not found: " + graph_path);
    } else {
        SplitFrames parts = split_chrono(frame, cfg.split);
        g = discover_graph(parts.train, cfg.pc_alpha);
        write_graph_csv(g, frame.names, graph_path);
        ctx.output(graph_path);
    }

    PriorMasks priors = prior_matrices(all_roles(g), n_vars);
    PreparedData prep =
        prepare_windows(frame, cfg.split, cfg.lookback, cfg.horizon, cfg.stride);

    ModelConfig mc;
    mc.n_vars = n_vars;
    mc.lookback = cfg.lookback;
    mc.horizon = cfg.horizon;
    mc.dim = cfg.model_dim;
    mc.enc_width = cfg.enc_width;
    mc.layers = cfg.layers;
    mc.heads = cfg.heads;
    mc.backbone = cfg.backbone;
    mc.alpha = cfg.adapter_alpha;
    mc.beta = cfg.adapter_beta;
    mc.validate();
    ForecastModel model(mc, priors, cfg.seed);

    TrainConfig tc;
    tc.lr = cfg.lr;
    tc.batch = cfg.batch;
    tc.max_epochs = cfg.epochs;
    tc.patience = cfg.patience;
    tc.lambda = cfg.lambda;
    tc.seed = cfg.seed;
    TrainResult result = train(model, prep.train, prep.val, tc);

    const std::string ckpt_path = ctx.out_path("checkpoint.txt");
    save_checkpoint(ckpt_path, model, prep.names, prep.norm.mean().transpose(),
                    prep.norm.std().transpose());
    ctx.output(ckpt_path);

    const std::string hist_path = ctx.out_path("loss_history.csv");
    write_history_csv(hist_path, result.history);
    ctx.output(hist_path);

    for (const char* gate : {"dcs", "ccs", "sp"}) {
        const std::string path = ctx.out_path(std::string("gates_") + gate + ".csv");
        write_labeled_square(path, model.gate_matrix(gate), prep.names);
        ctx.output(path);
    }
    ctx.finish();
    std::cout << "train: best epoch " << result.best_epoch << ", val mse "
              << format_double(result.best_val_mse) << " -> " << ckpt_path << "\n";
    return exit_code::ok;
}

// ---------------------------------------------------------------------------
// eval: score a checkpoint on each split -> metrics.csv

int run_eval(const CommonFlags& common, std::string ckpt_path) {
    RunConfig cfg = resolve_config(common);
    RunContext ctx("eval", cfg, common);

    if (ckpt_path.empty()) ckpt_path = ctx.out_path("checkpoint.txt");
    Checkpoint ckpt = load_checkpoint(ckpt_path);  // missing -> exit 5
    ctx.input(ckpt_path);
    ForecastModel model = model_from_checkpoint(ckpt);

    SeriesFrame frame = load_data(cfg);
    ctx.input(cfg.data_path);
    if (static_cast<int>(frame.cols()) != ckpt.config.n_vars)
        throw DataError("data has " + std::to_string(frame.cols()) +
                        " variables but the checkpoint expects " +
                        std::to_string(ckpt.config.n_vars));

    // z-score with the stored train statistics, then window each split.
    frame.values = (frame.values.rowwise() - ckpt.norm_mean.transpose()).array().rowwise() /
                   ckpt.norm_std.transpose().array();
    SplitFrames parts = split_chrono(frame, cfg.split);

    const std::string metrics_path = ctx.out_path("metrics.csv");
    {
        std::ofstream out = open_out(metrics_path);
        out << "split,mse,mae\n";
        for (const char* split : {"train", "val", "test"}) {
            const SeriesFrame& part = pick_split(parts, split);
            if (window_count(static_cast<int>(part.rows()), cfg.lookback, cfg.horizon,
                             cfg.stride) < 1)
                continue;
            WindowSet w = make_windows(part, cfg.lookback, cfg.horizon, cfg.stride);
            EvalMetrics m = evaluate(model, w);
            out << split << ',' << format_double(m.mse) << ',' << format_double(m.mae)
                << '\n';
        }
    }
    ctx.output(metrics_path);
    ctx.finish();
    std::cout << "eval: " << ckpt_path << " -> " << metrics_path << "\n";
    return exit_code::ok;
}

// ---------------------------------------------------------------------------
// perturb: prior-robustness sweep -> perturb.csv

int run_perturb(const CommonFlags& common, const std::string& mode_str,
                const std::string& ratios_str) {
    RunConfig cfg = resolve_config(common);
    RunContext ctx("perturb", cfg, common);

    PerturbMode mode;
    if (mode_str == "FN" || mode_str == "fn") {
        mode = PerturbMode::fn;
    } else if (mode_str == "FP" || mode_str == "fp") {
        mode = PerturbMode::fp;
    } else {
        throw ConfigError("--mode must be FN or FP, got: " + mode_str);
    }

    std::vector<double> ratios;
    std::size_t pos = 0;
    while (pos <= ratios_str.size()) {
        std::size_t comma = ratios_str.find(',', pos);
        if (comma == std::string::npos) comma = ratios_str.size();
        const std::string tok = ratios_str.substr(pos, comma - pos);
        ratios.push_back(parse_cell(tok, 0, "--ratios"));
        if (ratios.back() < 0.0 || ratios.back() > 1.0)
            throw ConfigError("perturbation ratios must lie in [0,1]");
        pos = comma + 1;
    }

    std::vector<RobustnessRow> rows = run_robustness(experiment_config(cfg), ratios, mode);

    const std::string path = ctx.out_path("perturb.csv");
    {
        std::ofstream out = open_out(path);
        out << "ratio,mse_dca,mse_static\n";
        for (const RobustnessRow& r : rows)
            out << format_double(r.ratio) << ',' << format_double(r.mse_dca) << ','
                << format_double(r.mse_static) << '\n';
    }
    ctx.output(path);
    ctx.finish();
    std::cout << "perturb: mode " << mode_str << ", " << rows.size() << " ratios -> "
              << path << "\n";
    return exit_code::ok;
}

// ---------------------------------------------------------------------------
// ablate: architecture-variant table -> ablate.csv (+ baselines.csv)

int run_ablate(const CommonFlags& common, bool with_baselines) {
    RunConfig cfg = resolve_config(common);
    RunContext ctx("ablate", cfg, common);
    ExperimentConfig ecfg = experiment_config(cfg);

    std::vector<AblationRow> rows = run_ablation(ecfg);
    const std::string path = ctx.out_path("ablate.csv");
    {
        std::ofstream out = open_out(path);
        out << "variant,mean_mse,mean_mae";
        for (int s = 0; s < ecfg.seeds; ++s) out << ",seed_" << s;
        out << '\n';
        for (const AblationRow& r : rows) {
            out << r.variant << ',' << format_double(r.mean_mse) << ','
                << format_double(r.mean_mae);
            for (double v : r.seed_mse) out << ',' << format_double(v);
            out << '\n';
        }
    }
    ctx.output(path);

    if (with_baselines) {
        // On external data the roles come from discovery on the training split;
        // without data the suite system and its true-graph roles are used.
        BaselineComparisonResult res;
        std::vector<std::string> names;
        if (!cfg.data_path.empty()) {
            SeriesFrame frame = load_data(cfg);
            ctx.input(cfg.data_path);
            SplitFrames parts = split_chrono(frame, cfg.split);
            Cpdag g = discover_graph(parts.train, cfg.pc_alpha);
            res = run_baseline_comparison_on(frame, all_roles(g), ecfg);
            names = frame.names;
        } else {
            res = run_baseline_comparison(ecfg);
            for (int i = 0; i < res.per_target_one.size(); ++i)
                names.push_back("V" + std::to_string(i));
        }
        const std::string bpath = ctx.out_path("baselines.csv");
        {
            std::ofstream out = open_out(bpath);
            out << "target,mse_all_to_one,mse_all_to_all\n";
            for (int i = 0; i < res.per_target_one.size(); ++i)
                out << names[static_cast<std::size_t>(i)] << ','
                    << format_double(res.per_target_one(i)) << ','
                    << format_double(res.per_target_all(i)) << '\n';
            out << "overall," << format_double(res.all_to_one_mse) << ','
                << format_double(res.all_to_all_mse) << '\n';
        }
        ctx.output(bpath);
    }
    ctx.finish();
    std::cout << "ablate: " << rows.size() << " variants x " << ecfg.seeds
              << " seeds -> " << path << "\n";
    return exit_code::ok;
}

// ---------------------------------------------------------------------------
// gapexp: generalization gap with/without the spouse projection -> gap.csv

int run_gapexp(const CommonFlags& common) {
    RunConfig cfg = resolve_config(common);
    RunContext ctx("gapexp", cfg, common);

    GapResult res = run_gap_experiment(experiment_config(cfg));

    const std::string path = ctx.out_path("gap.csv");
    {
        std::ofstream out = open_out(path);
        out << "arm,train_mse,test_mse,gap\n";
        out << "with_projection," << format_double(res.train_with) << ','
            << format_double(res.test_with) << ',' << format_double(res.gap_with) << '\n';
        out << "without_projection," << format_double(res.train_without) << ','
            << format_double(res.test_without) << ',' << format_double(res.gap_without)
            << '\n';
    }
    ctx.output(path);

    const std::string hist_with = ctx.out_path("gap_history_with.csv");
    const std::string hist_without = ctx.out_path("gap_history_without.csv");
    write_history_csv(hist_with, res.history_with);
    write_history_csv(hist_without, res.history_without);
    ctx.output(hist_with);
    ctx.output(hist_without);
    ctx.finish();
    std::cout << "gapexp: gap " << format_double(res.gap_with) << " (with) vs "
              << format_double(res.gap_without) << " (without) -> " << path << "\n";
    return exit_code::ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"causal-structure-aware time-series forecasting pipeline"};
    app.require_subcommand(1);

    CommonFlags common;

    CLI::App* c_synth = app.add_subcommand("synth", "Sample a synthetic system");
    SynthFlags sf;
    add_common_flags(c_synth, common);
    c_synth->add_option("--dag", sf.dag, "System: suite | collider | pair")
        ->check(CLI::IsMember({"suite", "collider", "pair"}));
    c_synth->add_option("--mode", sf.mode, "Sampling: lagged | iid")
        ->check(CLI::IsMember({"lagged", "iid"}));
    c_synth->add_option("--n", sf.n, "Rows to sample (default exp.rows)");
    c_synth->add_option("--obs-noise", sf.obs_noise,
                        "Observation noise std (default exp.obs_noise)");

    CLI::App* c_discover = app.add_subcommand("discover", "Estimate the causal graph");
    std::string discover_split = "all";
    add_common_flags(c_discover, common);
    c_discover->add_option("--split", discover_split, "Rows to use: all | train | val | test")
        ->check(CLI::IsMember({"all", "train", "val", "test"}));

    CLI::App* c_granger = app.add_subcommand("granger", "Pairwise predictive screen");
    add_common_flags(c_granger, common);

    CLI::App* c_decompose = app.add_subcommand("decompose", "Per-target causal roles");
    std::string decompose_graph;
    add_common_flags(c_decompose, common);
    c_decompose->add_option("--graph", decompose_graph,
                            "Graph CSV (default <out.dir>/graph.csv)");

    CLI::App* c_train = app.add_subcommand("train", "Fit the forecaster");
    std::string train_graph;
    add_common_flags(c_train, common);
    CLI::Option* train_graph_opt = c_train->add_option(
        "--graph", train_graph, "Graph CSV (default <out.dir>/graph.csv, else inline discovery)");

    CLI::App* c_eval = app.add_subcommand("eval", "Score a checkpoint per split");
    std::string eval_ckpt;
    add_common_flags(c_eval, common);
    c_eval->add_option("--checkpoint", eval_ckpt,
                       "Checkpoint file (default <out.dir>/checkpoint.txt)");

    CLI::App* c_perturb = app.add_subcommand("perturb", "Prior-robustness sweep");
    std::string perturb_mode = "FN";
    std::string perturb_ratios = "0,0.1,0.2,0.3";
    add_common_flags(c_perturb, common);
    c_perturb->add_option("--mode", perturb_mode, "Graph corruption: FN | FP");
    c_perturb->add_option("--ratios", perturb_ratios, "Comma-separated ratios in [0,1]");

    CLI::App* c_ablate = app.add_subcommand("ablate", "Architecture-variant table");
    bool ablate_baselines = false;
    add_common_flags(c_ablate, common);
    c_ablate->add_flag("--baselines", ablate_baselines,
                       "Also compare input-restricted per-target baselines");

    CLI::App* c_gapexp = app.add_subcommand("gapexp", "Generalization-gap experiment");
    add_common_flags(c_gapexp, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return exit_code::config;
    }

    try {
        if (*c_synth) return run_synth(common, sf);
        if (*c_discover) return run_discover(common, discover_split);
        if (*c_granger) return run_granger(common);
        if (*c_decompose) return run_decompose(common, decompose_graph);
        if (*c_train) return run_train(common, train_graph, train_graph_opt->count() > 0);
        if (*c_eval) return run_eval(common, eval_ckpt);
        if (*c_perturb) return run_perturb(common, perturb_mode, perturb_ratios);
        if (*c_ablate) return run_ablate(common, ablate_baselines);
        if (*c_gapexp) return run_gapexp(common);
        throw ConfigError("no subcommand selected");
    } catch (const ConfigError& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return exit_code::config;
    } catch (const DataError& e) {
        std::cerr << "error: data: " << e.what() << "\n";
        return exit_code::data;
    } catch (const NumericError& e) {
        std::cerr << "error: numeric: " << e.what() << "\n";
        return exit_code::numeric;
    } catch (const MissingArtifactError& e) {
        std::cerr << "error: missing-artifact: " << e.what() << "\n";
        return exit_code::missing_artifact;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
}
