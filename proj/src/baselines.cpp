#include "causalts/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "causalts/errors.hpp"
#include "causalts/rng.hpp"

namespace causalts {

void BaselineConfig::validate() const {
    if (n_vars < 2) throw ConfigError("baseline: n_vars must be >= 2");
    if (lookback < 1) throw ConfigError("baseline: lookback must be >= 1");
    if (horizon < 1) throw ConfigError("baseline: horizon must be >= 1");
    if (hidden < 1) throw ConfigError("baseline: hidden must be >= 1");
    if (allowed.rows() != n_vars || allowed.cols() != n_vars) {
        throw ConfigError("baseline: allowed mask must be D x D");
    }
    for (int i = 0; i < n_vars; ++i) {
        if (allowed.col(i).cwiseAbs().sum() == 0) {
            throw ConfigError("baseline: target " + std::to_string(i) +
                              " has no allowed inputs");
        }
    }
}

Eigen::MatrixXi all_to_all_mask(int n_vars) {
    return Eigen::MatrixXi::Ones(n_vars, n_vars);
}

Eigen::MatrixXi all_to_one_mask(const std::vector<RoleSet>& roles, int n_vars) {
    Eigen::MatrixXi allowed = Eigen::MatrixXi::Zero(n_vars, n_vars);
    if (static_cast<int>(roles.size()) != n_vars) {
        throw ConfigError("all_to_one_mask: need one role set per target");
    }
    for (int i = 0; i < n_vars; ++i) {
        const RoleSet& r = roles[static_cast<std::size_t>(i)];
        allowed(i, i) = 1;
        for (int j : r.direct()) allowed(j, i) = 1;
        for (int j : r.colliders) allowed(j, i) = 1;
    }
    return allowed;
}

BaselineModel::BaselineModel(BaselineConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
    cfg_.validate();
    Rng root(seed);
    auto xavier = [&](Eigen::Index r, Eigen::Index c) {
        Rng s = root.stream(static_cast<std::uint64_t>(params_.size()));
        const double limit = std::sqrt(6.0 / static_cast<double>(r + c));
        Eigen::MatrixXd m(r, c);
        for (Eigen::Index i = 0; i < r; ++i) {
            for (Eigen::Index j = 0; j < c; ++j) m(i, j) = s.uniform(-limit, limit);
        }
        return m;
    };
    auto add = [&](const std::string& name, Eigen::MatrixXd value) {
        ParamTensor p;
        p.name = name;
        p.adam_m = Eigen::MatrixXd::Zero(value.rows(), value.cols());
        p.adam_v = Eigen::MatrixXd::Zero(value.rows(), value.cols());
        p.value = std::move(value);
        p.trainable = true;
        params_.push_back(std::move(p));
        return static_cast<int>(params_.size()) - 1;
    };

    const Eigen::Index in_dim = static_cast<Eigen::Index>(cfg_.n_vars) * cfg_.lookback;
    target_idx_.reserve(static_cast<std::size_t>(cfg_.n_vars));
    for (int i = 0; i < cfg_.n_vars; ++i) {
        const std::string p = "t" + std::to_string(i) + ".";
        std::array<int, 4> idx{};
        idx[0] = add(p + "w1", xavier(in_dim, cfg_.hidden));
        idx[1] = add(p + "b1", Eigen::MatrixXd::Zero(1, cfg_.hidden));
        idx[2] = add(p + "w2", xavier(cfg_.hidden, cfg_.horizon));
        idx[3] = add(p + "b2", Eigen::MatrixXd::Zero(1, cfg_.horizon));
        target_idx_.push_back(idx);
    }
}

std::size_t BaselineModel::parameter_count() const {
    std::size_t n = 0;
    for (const ParamTensor& p : params_) n += static_cast<std::size_t>(p.value.size());
    return n;
}

BaselineModel::Bound BaselineModel::bind(Tape& tape, bool with_grads) const {
    Bound b;
    b.vars.reserve(params_.size());
    for (const ParamTensor& p : params_) b.vars.push_back(tape.leaf(p.value, with_grads));
    return b;
}

std::vector<Var> BaselineModel::forward_window(Tape& t, const Bound& b,
                                               const Eigen::MatrixXd& history) const {
    if (history.rows() != cfg_.lookback || history.cols() != cfg_.n_vars) {
        throw DataError("baseline forward: history must be lookback x n_vars");
    }
    auto V = [&](int k) { return b.vars[static_cast<std::size_t>(k)]; };
    std::vector<Var> out;
    out.reserve(static_cast<std::size_t>(cfg_.n_vars));
    for (int i = 0; i < cfg_.n_vars; ++i) {
        Eigen::MatrixXd flat(1, static_cast<Eigen::Index>(cfg_.n_vars) * cfg_.lookback);
        for (int j = 0; j < cfg_.n_vars; ++j) {
            const bool on = cfg_.allowed(j, i) != 0;
            for (int s = 0; s < cfg_.lookback; ++s) {
                flat(0, static_cast<Eigen::Index>(j) * cfg_.lookback + s) =
                    on ? history(s, j) : 0.0;
            }
        }
        Var x = t.leaf(std::move(flat), false);
        const std::array<int, 4>& idx = target_idx_[static_cast<std::size_t>(i)];
        Var h = t.gelu(t.add_rowvec(t.matmul(x, V(idx[0])), V(idx[1])));
        out.push_back(t.add_rowvec(t.matmul(h, V(idx[2])), V(idx[3])));
    }
    return out;
}

Var BaselineModel::loss(Tape& t, const Bound& b, const WindowSet& windows,
                        const std::vector<int>& order) const {
    if (order.empty()) throw DataError("baseline loss: empty window list");
    if (windows.n_vars() != cfg_.n_vars || windows.horizon() != cfg_.horizon ||
        windows.lookback() != cfg_.lookback) {
        throw DataError("baseline loss: window set does not match the model shape");
    }
    std::vector<Var> rows_pred;
    rows_pred.reserve(order.size() * static_cast<std::size_t>(cfg_.n_vars));
    Eigen::MatrixXd target(static_cast<Eigen::Index>(order.size()) * cfg_.n_vars,
                           cfg_.horizon);
    Eigen::Index r = 0;
    for (int k : order) {
        if (k < 0 || k >= windows.size()) {
            throw DataError("baseline loss: window index out of range");
        }
        std::vector<Var> preds = forward_window(t, b, windows.history(k));
        Eigen::MatrixXd fut = windows.future(k);
        for (int i = 0; i < cfg_.n_vars; ++i) {
            rows_pred.push_back(preds[static_cast<std::size_t>(i)]);
            target.row(r++) = fut.col(i).transpose();
        }
    }
    return t.mse_to(t.concat_rows(rows_pred), target);
}

Eigen::MatrixXd BaselineModel::predict(const Eigen::MatrixXd& history) const {
    Tape t;
    Bound b = bind(t, false);
    std::vector<Var> preds = forward_window(t, b, history);
    Eigen::MatrixXd out(cfg_.horizon, cfg_.n_vars);
    for (int i = 0; i < cfg_.n_vars; ++i) {
        out.col(i) = t.val(preds[static_cast<std::size_t>(i)]).row(0).transpose();
    }
    return out;
}

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

}  // namespace

BaselineTrainResult train_baseline(BaselineModel& model, const WindowSet& train_windows,
                                   const WindowSet& val_windows, const TrainConfig& cfg) {
    cfg.validate();
    if (train_windows.size() < 1) throw DataError("baseline train: no training windows");
    if (val_windows.size() < 1) throw DataError("baseline train: no validation windows");

    Rng root(cfg.seed);
    std::vector<int> order(static_cast<std::size_t>(train_windows.size()));
    std::iota(order.begin(), order.end(), 0);

    BaselineTrainResult result;
    std::vector<Eigen::MatrixXd> best_values;
    double best_val = std::numeric_limits<double>::infinity();
    int bad_epochs = 0;
    int adam_t = 0;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        Rng shuffler = root.stream(static_cast<std::uint64_t>(epoch));
        shuffler.shuffle(order);

        double mse_weighted = 0.0;
        int windows_seen = 0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch));
            std::vector<int> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                   order.begin() + static_cast<std::ptrdiff_t>(stop));

            Tape tape;
            BaselineModel::Bound bound = model.bind(tape, true);
            Var loss = model.loss(tape, bound, train_windows, batch);
            const double total = tape.val(loss)(0, 0);
            if (!std::isfinite(total) || total > cfg.divergence_limit) {
                throw NumericError("baseline train: loss diverged at epoch " +
                                   std::to_string(epoch));
            }
            tape.backward(loss);
            ++adam_t;
            const double bc1 = 1.0 - std::pow(kAdamBeta1, adam_t);
            const double bc2 = 1.0 - std::pow(kAdamBeta2, adam_t);
            std::vector<ParamTensor>& params = model.params();
            for (std::size_t k = 0; k < params.size(); ++k) {
                ParamTensor& p = params[k];
                const Eigen::MatrixXd& g = tape.grad(bound.vars[k]);
                p.adam_m = kAdamBeta1 * p.adam_m + (1.0 - kAdamBeta1) * g;
                p.adam_v =
                    kAdamBeta2 * p.adam_v + (1.0 - kAdamBeta2) * g.cwiseProduct(g);
                Eigen::MatrixXd m_hat = p.adam_m / bc1;
                Eigen::MatrixXd v_hat = p.adam_v / bc2;
                p.value -= cfg.lr * (m_hat.array() / (v_hat.array().sqrt() + kAdamEps)).matrix();
            }
            mse_weighted += total * static_cast<double>(batch.size());
            windows_seen += static_cast<int>(batch.size());
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_mse = mse_weighted / static_cast<double>(windows_seen);
        stats.val_mse = evaluate_baseline(model, val_windows).mse;
        stats.reg = 0.0;
        result.history.push_back(stats);

        if (stats.val_mse < best_val - 1e-12) {
            best_val = stats.val_mse;
            result.best_epoch = epoch;
            best_values.clear();
            for (const ParamTensor& p : model.params()) best_values.push_back(p.value);
            bad_epochs = 0;
        } else {
            ++bad_epochs;
            if (bad_epochs >= cfg.patience) {
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

EvalMetrics evaluate_baseline(const BaselineModel& model, const WindowSet& windows) {
    if (windows.size() < 1) throw DataError("baseline evaluate: no windows");
    double sq_sum = 0.0;
    double abs_sum = 0.0;
    std::int64_t n_entries = 0;
    for (int k = 0; k < windows.size(); ++k) {
        Eigen::MatrixXd err = model.predict(windows.history(k)) - windows.future(k);
        sq_sum += err.squaredNorm();
        abs_sum += err.cwiseAbs().sum();
        n_entries += static_cast<std::int64_t>(err.size());
    }
    EvalMetrics m;
    m.mse = sq_sum / static_cast<double>(n_entries);
    m.mae = abs_sum / static_cast<double>(n_entries);
    return m;
}

Eigen::VectorXd per_target_mse(const BaselineModel& model, const WindowSet& windows) {
    if (windows.size() < 1) throw DataError("per_target_mse: no windows");
    const int d_vars = model.config().n_vars;
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(d_vars);
    for (int k = 0; k < windows.size(); ++k) {
        Eigen::MatrixXd err = model.predict(windows.history(k)) - windows.future(k);
        for (int i = 0; i < d_vars; ++i) sums(i) += err.col(i).squaredNorm();
    }
    const double denom = static_cast<double>(windows.size() * model.config().horizon);
    return sums / denom;
}

}  // namespace causalts
