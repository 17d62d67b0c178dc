#ifndef CAUSALTS_BASELINES_HPP
#define CAUSALTS_BASELINES_HPP

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "causalts/model.hpp"
#include "causalts/roles.hpp"
#include "causalts/series.hpp"
#include "causalts/tape.hpp"
#include "causalts/train.hpp"

namespace causalts {

// Per-target MLP forecaster used for the input-restriction comparison. Every
// target gets its own MLP over the flattened D*T history; variables a target
// is not allowed to read are zeroed in its input. Restricting inputs this way
// keeps parameter shapes (capacity) identical across comparisons.
struct BaselineConfig {
    int n_vars = 0;
    int lookback = 8;
    int horizon = 4;
    int hidden = 64;
    // allowed(j, i) != 0 lets variable j's history feed target i.
    Eigen::MatrixXi allowed;

    void validate() const;  // throws ConfigError
};

// Every variable feeds every target.
Eigen::MatrixXi all_to_all_mask(int n_vars);
// Each target reads itself, its direct causes and its collider causes.
Eigen::MatrixXi all_to_one_mask(const std::vector<RoleSet>& roles, int n_vars);

class BaselineModel {
public:
    BaselineModel(BaselineConfig cfg, std::uint64_t seed);

    const BaselineConfig& config() const { return cfg_; }
    std::vector<ParamTensor>& params() { return params_; }
    const std::vector<ParamTensor>& params() const { return params_; }
    std::size_t parameter_count() const;

    struct Bound {
        std::vector<Var> vars;
    };
    Bound bind(Tape& tape, bool with_grads) const;
    std::vector<Var> forward_window(Tape& tape, const Bound& b,
                                    const Eigen::MatrixXd& history) const;
    // Plain MSE over the listed windows, all targets, full horizon.
    Var loss(Tape& tape, const Bound& b, const WindowSet& windows,
             const std::vector<int>& order) const;
    Eigen::MatrixXd predict(const Eigen::MatrixXd& history) const;

private:
    BaselineConfig cfg_;
    std::vector<ParamTensor> params_;
    std::vector<std::array<int, 4>> target_idx_;  // w1, b1, w2, b2 per target
};

struct BaselineTrainResult {
    std::vector<EpochStats> history;  // reg stays 0
    int best_epoch = -1;
    double best_val_mse = 0.0;
    bool stopped_early = false;
};

// Same optimizer, schedule and early-stopping policy as the main trainer.
BaselineTrainResult train_baseline(BaselineModel& model, const WindowSet& train_windows,
                                   const WindowSet& val_windows, const TrainConfig& cfg);

EvalMetrics evaluate_baseline(const BaselineModel& model, const WindowSet& windows);

// Mean squared error per target over all windows and horizon steps.
Eigen::VectorXd per_target_mse(const BaselineModel& model, const WindowSet& windows);

}  // namespace causalts

#endif
