#ifndef CAUSALTS_EXPERIMENTS_HPP
#define CAUSALTS_EXPERIMENTS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "causalts/cpdag.hpp"
#include "causalts/dag.hpp"
#include "causalts/runconfig.hpp"
#include "causalts/scm.hpp"
#include "causalts/series.hpp"
#include "causalts/train.hpp"

namespace causalts {

// Seven-variable benchmark system: 5 -> 0, 0 -> 2, 3 -> 2, 3 -> 4, 6 -> 4,
// variable 1 isolated. For target 0 that yields parent {5}, collider child
// {2}, spouse {3} and spurious {1, 4, 6} — at least two spurious variables,
// as the ablation suite requires.
Dag suite_dag();
LinearScm suite_scm();

// Lagged sample from the suite system plus i.i.d. observation noise on every
// column. The noise makes cross-variable context genuinely useful (variables
// carrying shared latent state help denoise each other), so ablating context
// segments costs accuracy instead of being a wash.
SeriesFrame make_suite_frame(int rows, std::uint64_t seed, double obs_noise);

// Four-variable collider system for the generalization-gap experiment:
// 0 -> 2, 1 -> 2, 1 -> 3. For target 0, variable 1 is the spouse.
Dag gap_dag();
LinearScm gap_scm();
SeriesFrame make_gap_frame(int rows, std::uint64_t seed, double obs_noise);

// Two-variable lagged fixture 0 -> 1 for the predictive-asymmetry check.
LinearScm granger_scm();
SeriesFrame make_granger_frame(int rows, std::uint64_t seed);

// Chronological split -> train-statistics z-scoring -> sliding windows.
struct PreparedData {
    Normalizer norm;
    std::vector<std::string> names;
    WindowSet train;
    WindowSet val;
    WindowSet test;
};
PreparedData prepare_windows(const SeriesFrame& frame, const SplitSpec& split,
                             int lookback, int horizon, int stride);

// Knobs shared by the repeated-seed experiments (a subset of RunConfig).
struct ExperimentConfig {
    int rows = 480;
    double obs_noise = 0.3;
    int seeds = 5;
    std::uint64_t base_seed = 0;
    int lookback = 8;
    int horizon = 4;
    int stride = 1;
    int dim = 16;
    int enc_width = 16;
    int layers = 1;
    int heads = 1;
    std::string backbone = "transformer";
    double lr = 1e-3;
    int batch = 32;
    int epochs = 10;
    int patience = 3;
    double lambda = 0.2;
    double adapter_alpha = 1.0;
    double adapter_beta = 1.0;
};
ExperimentConfig experiment_config(const RunConfig& rc);

// The six architecture variants compared in the ablation table.
extern const std::vector<std::string> kAblationVariants;

// Model configuration for one named variant ("full", "static-prior",
// "random-init", "w/o DCS", "w/o CCS", "w/o mask").
ModelConfig variant_config(const ExperimentConfig& e, int n_vars,
                           const std::string& variant);

struct AblationRow {
    std::string variant;
    std::vector<double> seed_mse;
    double mean_mse = 0.0;
    double mean_mae = 0.0;
};
// Paired seeds: every variant sees the same data and the same parameter
// initialization per seed; only the ablation switch differs.
std::vector<AblationRow> run_ablation(const ExperimentConfig& cfg);

struct RobustnessRow {
    double ratio = 0.0;
    double mse_dca = 0.0;     // adapter logits trained
    double mse_static = 0.0;  // adapter logits frozen at the prior
};
// Train on priors derived from a perturbed graph at each ratio (0 = true
// graph); entries are seed means on the suite test split.
std::vector<RobustnessRow> run_robustness(const ExperimentConfig& cfg,
                                          const std::vector<double>& ratios,
                                          PerturbMode mode);

struct GapResult {
    double train_with = 0.0, test_with = 0.0, gap_with = 0.0;
    double train_without = 0.0, test_without = 0.0, gap_without = 0.0;
    // Seed-0 loss trajectories for plotting.
    std::vector<EpochStats> history_with;
    std::vector<EpochStats> history_without;
};
// Generalization gap (test - train MSE at the restored best checkpoint), seed
// means, with and without the spouse projection, on the collider system.
GapResult run_gap_experiment(const ExperimentConfig& cfg);

struct BaselineComparisonResult {
    double all_to_one_mse = 0.0;
    double all_to_all_mse = 0.0;
    Eigen::VectorXd per_target_one;
    Eigen::VectorXd per_target_all;
};
// Input-restriction comparison on the suite system with per-target MLPs of
// identical capacity.
BaselineComparisonResult run_baseline_comparison(const ExperimentConfig& cfg);

// Same comparison on a fixed dataset with externally supplied roles; seeds
// vary only the parameter initialization.
BaselineComparisonResult run_baseline_comparison_on(const SeriesFrame& frame,
                                                    const std::vector<RoleSet>& roles,
                                                    const ExperimentConfig& cfg);

}  // namespace causalts

#endif
