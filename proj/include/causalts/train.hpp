#ifndef CAUSALTS_TRAIN_HPP
#define CAUSALTS_TRAIN_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "causalts/model.hpp"
#include "causalts/series.hpp"

namespace causalts {

struct TrainConfig {
    double lr = 1e-3;
    int batch = 32;
    int max_epochs = 10;
    int patience = 3;          // epochs without val improvement before stopping
    double lambda = 0.2;       // adapter regularizer weight
    std::uint64_t seed = 0;    // drives the per-epoch shuffles
    double divergence_limit = 1e6;  // loss above this aborts with NumericError

    void validate() const;  // throws ConfigError
};

struct EpochStats {
    int epoch = 0;
    double train_mse = 0.0;
    double val_mse = 0.0;
    double reg = 0.0;
};

struct TrainResult {
    std::vector<EpochStats> history;
    int best_epoch = -1;       // epoch whose weights the model ends up with
    double best_val_mse = 0.0;
    bool stopped_early = false;
};

using EpochHook = std::function<void(const EpochStats&)>;

// Adam training with early stopping on validation MSE. The model is left at
// the best-validation weights seen. Deterministic for a fixed config and
// model: all shuffles derive from cfg.seed.
TrainResult train(ForecastModel& model, const WindowSet& train_windows,
                  const WindowSet& val_windows, const TrainConfig& cfg,
                  const EpochHook& hook = nullptr);

struct EvalMetrics {
    double mse = 0.0;
    double mae = 0.0;
};

// Forecast error over every window/target/horizon step, in the space the
// windows are expressed in.
EvalMetrics evaluate(const ForecastModel& model, const WindowSet& windows);

// Compares reverse-mode gradients of the training loss against central
// differences on a sample of trainable coordinates (all of them when fewer
// than min_coords). Returns the worst relative error
// |a - n| / max(1e-8, |a| + |n|). Restores the model parameters.
//
// Values flowing through stop_gradient are held at their unperturbed values
// during the difference evaluations, because that is the derivative the
// reverse sweep reports; letting them move would measure the total derivative
// instead and disagree wherever a detached branch depends on the parameters.
double grad_check(ForecastModel& model, const WindowSet& windows,
                  const std::vector<int>& order, double lambda,
                  double eps = 1e-5, int min_coords = 200,
                  std::uint64_t seed = 1);

}  // namespace causalts

#endif
