#include "causalts/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "causalts/errors.hpp"
#include "causalts/rng.hpp"
#include "causalts/tape.hpp"

namespace causalts {

void TrainConfig::validate() const {
    if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("train: lr must be positive");
    if (batch < 1) throw ConfigError("train: batch must be >= 1");
    if (max_epochs < 1) throw ConfigError("train: max_epochs must be >= 1");
    if (patience < 1) throw ConfigError("train: patience must be >= 1");
    if (lambda < 0.0 || !std::isfinite(lambda)) {
        throw ConfigError("train: lambda must be >= 0");
    }
    if (!(divergence_limit > 0.0)) {
        throw ConfigError("train: divergence_limit must be positive");
    }
}

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

void adam_step(std::vector<ParamTensor>& params, Tape& tape,
               const ForecastModel::Bound& bound, double lr, int step) {
    const double bc1 = 1.0 - std::pow(kAdamBeta1, step);
    const double bc2 = 1.0 - std::pow(kAdamBeta2, step);
    for (std::size_t k = 0; k < params.size(); ++k) {
        ParamTensor& p = params[k];
        if (!p.trainable) continue;
        const Eigen::MatrixXd& g = tape.grad(bound.vars[k]);
        p.adam_m = kAdamBeta1 * p.adam_m + (1.0 - kAdamBeta1) * g;
        p.adam_v = kAdamBeta2 * p.adam_v + (1.0 - kAdamBeta2) * g.cwiseProduct(g);
        Eigen::MatrixXd m_hat = p.adam_m / bc1;
        Eigen::MatrixXd v_hat = p.adam_v / bc2;
        p.value -= lr * (m_hat.array() / (v_hat.array().sqrt() + kAdamEps)).matrix();
    }
}

double forward_loss(const ForecastModel& model, const WindowSet& windows,
                    const std::vector<int>& order, double lambda,
                    const std::vector<Eigen::MatrixXd>* pinned_detached = nullptr) {
    Tape tape;
    tape.replay_detached = pinned_detached;
    ForecastModel::Bound bound = model.bind(tape, false);
    ForecastModel::LossParts parts = model.loss(tape, bound, windows, order, lambda);
    return tape.val(parts.total)(0, 0);
}

}  // namespace

TrainResult train(ForecastModel& model, const WindowSet& train_windows,
                  const WindowSet& val_windows, const TrainConfig& cfg,
                  const EpochHook& hook) {
    cfg.validate();
    if (train_windows.size() < 1) throw DataError("train: no training windows");
    if (val_windows.size() < 1) throw DataError("train: no validation windows");

    Rng root(cfg.seed);
    std::vector<int> order(static_cast<std::size_t>(train_windows.size()));
    std::iota(order.begin(), order.end(), 0);

    TrainResult result;
    std::vector<Eigen::MatrixXd> best_values;
    double best_val = std::numeric_limits<double>::infinity();
    int epochs_without_improvement = 0;
    int adam_t = 0;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        Rng shuffler = root.stream(static_cast<std::uint64_t>(epoch));
        shuffler.shuffle(order);

        double mse_weighted = 0.0;
        double reg_last = 0.0;
        int windows_seen = 0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch));
            std::vector<int> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                   order.begin() + static_cast<std::ptrdiff_t>(stop));

            Tape tape;
            ForecastModel::Bound bound = model.bind(tape, true);
            ForecastModel::LossParts parts =
                model.loss(tape, bound, train_windows, batch, cfg.lambda);
            const double total = tape.val(parts.total)(0, 0);
            if (!std::isfinite(total) || total > cfg.divergence_limit) {
                throw NumericError("train: loss diverged at epoch " +
                                   std::to_string(epoch));
            }
            tape.backward(parts.total);
            ++adam_t;
            adam_step(model.params(), tape, bound, cfg.lr, adam_t);

            mse_weighted += parts.mse * static_cast<double>(batch.size());
            reg_last = parts.reg;
            windows_seen += static_cast<int>(batch.size());
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_mse = mse_weighted / static_cast<double>(windows_seen);
        stats.val_mse = evaluate(model, val_windows).mse;
        stats.reg = reg_last;
        result.history.push_back(stats);
        if (hook) hook(stats);

        if (stats.val_mse < best_val - 1e-12) {
            best_val = stats.val_mse;
            result.best_epoch = epoch;
            best_values.clear();
            for (const ParamTensor& p : model.params()) best_values.push_back(p.value);
            epochs_without_improvement = 0;
        } else {
            ++epochs_without_improvement;
            if (epochs_without_improvement >= cfg.patience) {
                result.stopped_early = true;
                break;
            }
        }
    }

    if (!best_values.empty()) {
        std::vector<ParamTensor>& params = model.params();
        for (std::size_t k = 0; k < params.size(); ++k) params[k].value = best_values[k];
    }
    result.best_val_mse = best_val;
    return result;
}

EvalMetrics evaluate(const ForecastModel& model, const WindowSet& windows) {
    if (windows.size() < 1) throw DataError("evaluate: no windows");
    double sq_sum = 0.0;
    double abs_sum = 0.0;
    std::int64_t n_entries = 0;
    for (int k = 0; k < windows.size(); ++k) {
        Eigen::MatrixXd pred = model.predict(windows.history(k));
        Eigen::MatrixXd err = pred - windows.future(k);
        sq_sum += err.squaredNorm();
        abs_sum += err.cwiseAbs().sum();
        n_entries += static_cast<std::int64_t>(err.size());
    }
    EvalMetrics m;
    m.mse = sq_sum / static_cast<double>(n_entries);
    m.mae = abs_sum / static_cast<double>(n_entries);
    return m;
}

double grad_check(ForecastModel& model, const WindowSet& windows,
                  const std::vector<int>& order, double lambda, double eps,
                  int min_coords, std::uint64_t seed) {
    // The analytic gradient treats stop_gradient outputs as constants, so the
    // finite-difference passes below must hold them at the values recorded
    // here; otherwise the two sides measure different derivatives.
    std::vector<Eigen::MatrixXd> detached;
    Tape tape;
    tape.record_detached = &detached;
    ForecastModel::Bound bound = model.bind(tape, true);
    ForecastModel::LossParts parts = model.loss(tape, bound, windows, order, lambda);
    tape.backward(parts.total);

    std::vector<Eigen::MatrixXd> analytic;
    analytic.reserve(model.params().size());
    for (std::size_t k = 0; k < model.params().size(); ++k) {
        analytic.push_back(tape.grad(bound.vars[k]));
    }

    std::vector<std::pair<int, int>> coords;
    for (std::size_t k = 0; k < model.params().size(); ++k) {
        if (!model.params()[k].trainable) continue;
        for (int off = 0; off < model.params()[k].value.size(); ++off) {
            coords.emplace_back(static_cast<int>(k), off);
        }
    }
    if (coords.empty()) throw DataError("grad_check: no trainable coordinates");

    Rng rng(seed);
    rng.shuffle(coords);
    const std::size_t n_check =
        std::min(coords.size(), static_cast<std::size_t>(std::max(min_coords, 1)));

    double worst = 0.0;
    for (std::size_t c = 0; c < n_check; ++c) {
        const int k = coords[c].first;
        const int off = coords[c].second;
        double* cell = model.params()[static_cast<std::size_t>(k)].value.data() + off;
        const double orig = *cell;
        *cell = orig + eps;
        const double f_plus = forward_loss(model, windows, order, lambda, &detached);
        *cell = orig - eps;
        const double f_minus = forward_loss(model, windows, order, lambda, &detached);
        *cell = orig;
        const double numeric = (f_plus - f_minus) / (2.0 * eps);
        const double analytic_v = analytic[static_cast<std::size_t>(k)].data()[off];
        const double rel = std::abs(analytic_v - numeric) /
                           std::max(1e-8, std::abs(analytic_v) + std::abs(numeric));
        worst = std::max(worst, rel);
    }
    return worst;
}

}  // namespace causalts
