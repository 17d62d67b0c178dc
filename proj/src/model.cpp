#include "causalts/model.hpp"

#include <cmath>
#include <utility>

#include "causalts/errors.hpp"
#include "causalts/rng.hpp"

namespace causalts {

void ModelConfig::validate() const {
    if (n_vars < 2) throw ConfigError("model: n_vars must be >= 2");
    if (lookback < 1) throw ConfigError("model: lookback must be >= 1");
    if (horizon < 1) throw ConfigError("model: horizon must be >= 1");
    if (dim < 1) throw ConfigError("model: dim must be >= 1");
    if (enc_width < 1) throw ConfigError("model: enc_width must be >= 1");
    if (layers < 1) throw ConfigError("model: layers must be >= 1");
    if (heads < 1 || dim % heads != 0) {
        throw ConfigError("model: heads must divide dim");
    }
    if (ffn_mult < 1) throw ConfigError("model: ffn_mult must be >= 1");
    if (backbone != "transformer" && backbone != "mlp") {
        throw ConfigError("model: backbone must be 'transformer' or 'mlp'");
    }
    if (!std::isfinite(alpha) || !std::isfinite(beta)) {
        throw ConfigError("model: alpha/beta must be finite");
    }
}

namespace {

Eigen::MatrixXd sinusoidal_pe(int t_len, int dim, bool restart) {
    Eigen::MatrixXd pe(3 * t_len, dim);
    for (int r = 0; r < 3 * t_len; ++r) {
        const double pos = static_cast<double>(restart ? r % t_len : r);
        for (int j = 0; j < dim; ++j) {
            const int k = j / 2;
            const double div = std::pow(10000.0, 2.0 * k / static_cast<double>(dim));
            pe(r, j) = (j % 2 == 0) ? std::sin(pos / div) : std::cos(pos / div);
        }
    }
    return pe;
}

}  // namespace

ForecastModel::ForecastModel(ModelConfig cfg, PriorMasks priors, std::uint64_t seed)
    : cfg_(std::move(cfg)), priors_(std::move(priors)) {
    cfg_.validate();
    const int d_vars = cfg_.n_vars;
    auto check_mask = [&](const Eigen::MatrixXi& m, const char* what) {
        if (m.rows() != d_vars || m.cols() != d_vars) {
            throw ConfigError(std::string("model: ") + what + " prior mask must be D x D");
        }
    };
    check_mask(priors_.dcs, "direct-cause");
    check_mask(priors_.ccs, "collider");
    check_mask(priors_.sp, "spouse");

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
    auto zeros = [](Eigen::Index r, Eigen::Index c) { return Eigen::MatrixXd::Zero(r, c); };
    auto ones = [](Eigen::Index r, Eigen::Index c) { return Eigen::MatrixXd::Ones(r, c); };

    const int w = cfg_.enc_width;
    const int d = cfg_.dim;
    const int s_len = cfg_.horizon;

    idx_.enc_w1 = add_param("enc.w1", xavier(1, w), true);
    idx_.enc_b1 = add_param("enc.b1", zeros(1, w), true);
    idx_.enc_w2 = add_param("enc.w2", xavier(w, w), true);
    idx_.enc_b2 = add_param("enc.b2", zeros(1, w), true);
    idx_.enc_w3 = add_param("enc.w3", xavier(w, d), true);
    idx_.enc_b3 = add_param("enc.b3", zeros(1, d), true);

    idx_.gd_w = add_param("proj.direct.w", xavier(d, d), true);
    idx_.gd_b = add_param("proj.direct.b", zeros(1, d), true);
    idx_.gc_w = add_param("proj.collider.w", xavier(d, d), true);
    idx_.gc_b = add_param("proj.collider.b", zeros(1, d), true);
    idx_.gs_w = add_param("proj.spouse.w", xavier(d, d), true);
    idx_.gs_b = add_param("proj.spouse.b", zeros(1, d), true);

    AdapterInit logits = cfg_.use_prior
                             ? init_logits(priors_, cfg_.alpha, cfg_.beta)
                             : AdapterInit{zeros(d_vars, d_vars), zeros(d_vars, d_vars),
                                           zeros(d_vars, d_vars)};
    idx_.w_dcs = add_param("adapter.direct", logits.dcs, cfg_.learn_logits);
    idx_.w_ccs = add_param("adapter.collider", logits.ccs, cfg_.learn_logits);
    idx_.w_sp = add_param("adapter.spouse", logits.sp, cfg_.learn_logits);

    idx_.layers.resize(static_cast<std::size_t>(cfg_.layers));
    for (int l = 0; l < cfg_.layers; ++l) {
        const std::string p = "layer" + std::to_string(l) + ".";
        LayerIdx& li = idx_.layers[static_cast<std::size_t>(l)];
        li.ln1_g = add_param(p + "ln1.g", ones(1, d), true);
        li.ln1_b = add_param(p + "ln1.b", zeros(1, d), true);
        li.wq = add_param(p + "attn.wq", xavier(d, d), true);
        li.bq = add_param(p + "attn.bq", zeros(1, d), true);
        li.wk = add_param(p + "attn.wk", xavier(d, d), true);
        li.wv = add_param(p + "attn.wv", xavier(d, d), true);
        li.bv = add_param(p + "attn.bv", zeros(1, d), true);
        li.wo = add_param(p + "attn.wo", xavier(d, d), true);
        li.bo = add_param(p + "attn.bo", zeros(1, d), true);
        li.ln2_g = add_param(p + "ln2.g", ones(1, d), true);
        li.ln2_b = add_param(p + "ln2.b", zeros(1, d), true);
        li.f_w1 = add_param(p + "ffn.w1", xavier(d, cfg_.ffn_mult * d), true);
        li.f_b1 = add_param(p + "ffn.b1", zeros(1, cfg_.ffn_mult * d), true);
        li.f_w2 = add_param(p + "ffn.w2", xavier(cfg_.ffn_mult * d, d), true);
        li.f_b2 = add_param(p + "ffn.b2", zeros(1, d), true);
    }

    idx_.final_g = add_param("final_ln.g", ones(1, d), true);
    idx_.final_b = add_param("final_ln.b", zeros(1, d), true);
    idx_.pred_w = add_param("pred.w", xavier(d, s_len), true);
    idx_.pred_b = add_param("pred.b", zeros(1, s_len), true);

    idx_.sp_w1 = add_param("spouse_head.w1", xavier(s_len + d, d), true);
    idx_.sp_b1 = add_param("spouse_head.b1", zeros(1, d), true);
    idx_.sp_w2 = add_param("spouse_head.w2", xavier(d, s_len), true);
    idx_.sp_b2 = add_param("spouse_head.b2", zeros(1, s_len), true);

    pe_ = sinusoidal_pe(cfg_.lookback, d, cfg_.pe_restart);
    attn_mask_ = cfg_.segment_mask ? build_segment_mask(cfg_.lookback)
                                   : causal_mask(3 * cfg_.lookback);
}

int ForecastModel::add_param(const std::string& name, Eigen::MatrixXd value, bool trainable) {
    ParamTensor p;
    p.name = name;
    p.adam_m = Eigen::MatrixXd::Zero(value.rows(), value.cols());
    p.adam_v = Eigen::MatrixXd::Zero(value.rows(), value.cols());
    p.value = std::move(value);
    p.trainable = trainable;
    params_.push_back(std::move(p));
    return static_cast<int>(params_.size()) - 1;
}

std::size_t ForecastModel::parameter_count(bool trainable_only) const {
    std::size_t n = 0;
    for (const ParamTensor& p : params_) {
        if (!trainable_only || p.trainable) n += static_cast<std::size_t>(p.value.size());
    }
    return n;
}

ForecastModel::Bound ForecastModel::bind(Tape& tape, bool with_grads) const {
    Bound b;
    b.vars.reserve(params_.size());
    for (const ParamTensor& p : params_) {
        b.vars.push_back(tape.leaf(p.value, with_grads && p.trainable));
    }
    return b;
}

Eigen::MatrixXi ForecastModel::build_segment_mask(int t_len) {
    const int n = 3 * t_len;
    Eigen::MatrixXi allow = Eigen::MatrixXi::Zero(n, n);
    for (int r = 0; r < n; ++r) {
        const int seg_r = r / t_len;
        const int t_r = r % t_len;
        for (int c = 0; c < n; ++c) {
            const int seg_c = c / t_len;
            const int t_c = c % t_len;
            const bool same_seg_causal = (seg_c == seg_r) && (t_c <= t_r);
            const bool own_reads_all = (seg_r == 2) && (t_c <= t_r);
            if (same_seg_causal || own_reads_all) allow(r, c) = 1;
        }
    }
    return allow;
}

Eigen::MatrixXi ForecastModel::causal_mask(int n) {
    Eigen::MatrixXi allow = Eigen::MatrixXi::Zero(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c <= r; ++c) allow(r, c) = 1;
    }
    return allow;
}

Var ForecastModel::backbone_stack(Tape& t, const Bound& b, Var stream) const {
    auto V = [&](int k) { return b.vars[static_cast<std::size_t>(k)]; };
    const int dh = cfg_.dim / cfg_.heads;
    Var x = stream;
    for (const LayerIdx& li : idx_.layers) {
        if (cfg_.backbone == "transformer") {
            Var xn = t.layer_norm(x, V(li.ln1_g), V(li.ln1_b));
            Var q = t.add_rowvec(t.matmul(xn, V(li.wq)), V(li.bq));
            Var k = t.matmul(xn, V(li.wk));
            Var v = t.add_rowvec(t.matmul(xn, V(li.wv)), V(li.bv));
            std::vector<Var> head_out;
            head_out.reserve(static_cast<std::size_t>(cfg_.heads));
            for (int h = 0; h < cfg_.heads; ++h) {
                Var qh = t.cols(q, h * dh, dh);
                Var kh = t.cols(k, h * dh, dh);
                Var vh = t.cols(v, h * dh, dh);
                Var scores = t.scale(t.matmul(qh, t.transpose(kh)),
                                     1.0 / std::sqrt(static_cast<double>(dh)));
                Var probs = t.masked_softmax_rows(scores, attn_mask_);
                head_out.push_back(t.matmul(probs, vh));
            }
            Var attn = head_out.size() == 1 ? head_out[0] : t.concat_cols(head_out);
            Var attn_proj = t.add_rowvec(t.matmul(attn, V(li.wo)), V(li.bo));
            x = t.add(x, attn_proj);
        }
        Var x2 = t.layer_norm(x, V(li.ln2_g), V(li.ln2_b));
        Var h1 = t.gelu(t.add_rowvec(t.matmul(x2, V(li.f_w1)), V(li.f_b1)));
        Var h2 = t.add_rowvec(t.matmul(h1, V(li.f_w2)), V(li.f_b2));
        x = t.add(x, h2);
    }
    return t.layer_norm(x, V(idx_.final_g), V(idx_.final_b));
}

ForecastModel::SharedEnc ForecastModel::encode_shared(Tape& t, const Bound& b,
                                                      const Eigen::MatrixXd& history) const {
    const int d_vars = cfg_.n_vars;
    const int t_len = cfg_.lookback;
    if (history.rows() != t_len || history.cols() != d_vars) {
        throw DataError("forward: history must be lookback x n_vars");
    }
    auto V = [&](int k) { return b.vars[static_cast<std::size_t>(k)]; };

    // Variable-major flattening: block j holds variable j's T scalars.
    Eigen::MatrixXd flat(static_cast<Eigen::Index>(d_vars) * t_len, 1);
    for (int j = 0; j < d_vars; ++j) {
        for (int s = 0; s < t_len; ++s) {
            flat(static_cast<Eigen::Index>(j) * t_len + s, 0) = history(s, j);
        }
    }
    Var x0 = t.leaf(std::move(flat), false);
    Var e1 = t.gelu(t.add_rowvec(t.matmul(x0, V(idx_.enc_w1)), V(idx_.enc_b1)));
    Var e2 = t.gelu(t.add_rowvec(t.matmul(e1, V(idx_.enc_w2)), V(idx_.enc_b2)));
    SharedEnc enc;
    enc.tokens = t.add_rowvec(t.matmul(e2, V(idx_.enc_w3)), V(idx_.enc_b3));
    enc.bd = t.add_rowvec(t.matmul(enc.tokens, V(idx_.gd_w)), V(idx_.gd_b));
    enc.bc = t.add_rowvec(t.matmul(enc.tokens, V(idx_.gc_w)), V(idx_.gc_b));
    enc.bs = t.add_rowvec(t.matmul(enc.tokens, V(idx_.gs_w)), V(idx_.gs_b));
    return enc;
}

Var ForecastModel::stream_encode(Tape& t, const Bound& b, const SharedEnc& enc,
                                 int target) const {
    const int t_len = cfg_.lookback;
    const int d = cfg_.dim;
    auto V = [&](int k) { return b.vars[static_cast<std::size_t>(k)]; };

    Var dcs_ctx;
    if (cfg_.use_dcs) {
        Var gate = t.sigmoid(t.cols(V(idx_.w_dcs), target, 1));
        dcs_ctx = t.weighted_block_sum(enc.bd, gate, t_len);
    } else {
        dcs_ctx = t.leaf(Eigen::MatrixXd::Zero(t_len, d), false);
    }
    Var ccs_ctx;
    if (cfg_.use_ccs) {
        Var gate = t.sigmoid(t.cols(V(idx_.w_ccs), target, 1));
        ccs_ctx = t.weighted_block_sum(enc.bc, gate, t_len);
    } else {
        ccs_ctx = t.leaf(Eigen::MatrixXd::Zero(t_len, d), false);
    }
    Var own = t.rows(enc.tokens, target * t_len, t_len);

    Var stream = t.concat_rows({dcs_ctx, ccs_ctx, own});
    stream = t.add_const(stream, pe_);
    return backbone_stack(t, b, stream);
}

Var ForecastModel::encode_stream(Tape& t, const Bound& b,
                                 const Eigen::MatrixXd& history, int target) const {
    if (target < 0 || target >= cfg_.n_vars) {
        throw DataError("encode_stream: target out of range");
    }
    SharedEnc enc = encode_shared(t, b, history);
    return stream_encode(t, b, enc, target);
}

Eigen::MatrixXd ForecastModel::encode_tokens(const Eigen::MatrixXd& history) const {
    Tape t;
    Bound b = bind(t, false);
    SharedEnc enc = encode_shared(t, b, history);
    return t.val(enc.tokens);
}

void ForecastModel::override_attention_mask(Eigen::MatrixXi allow) {
    const int n = 3 * cfg_.lookback;
    if (allow.rows() != n || allow.cols() != n) {
        throw ConfigError("override_attention_mask: layout must be 3T x 3T");
    }
    attn_mask_ = std::move(allow);
}

std::vector<Var> ForecastModel::forward_window(Tape& t, const Bound& b,
                                               const Eigen::MatrixXd& history) const {
    const int d_vars = cfg_.n_vars;
    const int t_len = cfg_.lookback;
    auto V = [&](int k) { return b.vars[static_cast<std::size_t>(k)]; };

    SharedEnc enc = encode_shared(t, b, history);
    std::vector<Var> out;
    out.reserve(static_cast<std::size_t>(d_vars));
    for (int i = 0; i < d_vars; ++i) {
        Var stream = stream_encode(t, b, enc, i);

        Var readout;
        if (cfg_.readout_mean) {
            readout = t.mean_pool_rows(t.rows(stream, 2 * t_len, t_len));
        } else {
            readout = t.rows(stream, 3 * t_len - 1, 1);
        }
        Var y_raw = t.add_rowvec(t.matmul(readout, V(idx_.pred_w)), V(idx_.pred_b));

        if (cfg_.use_spouse_projection) {
            Var sp_gate = t.sigmoid(t.cols(V(idx_.w_sp), i, 1));
            Var sp_ctx = t.weighted_block_sum(enc.bs, sp_gate, t_len);
            Var sp_pool = t.mean_pool_rows(sp_ctx);
            Var head_in = t.concat_cols({t.stop_gradient(y_raw), sp_pool});
            Var ph = t.gelu(t.add_rowvec(t.matmul(head_in, V(idx_.sp_w1)), V(idx_.sp_b1)));
            Var phi = t.add_rowvec(t.matmul(ph, V(idx_.sp_w2)), V(idx_.sp_b2));
            out.push_back(t.sub(y_raw, phi));
        } else {
            out.push_back(y_raw);
        }
    }
    return out;
}

ForecastModel::LossParts ForecastModel::loss(Tape& t, const Bound& b,
                                             const WindowSet& windows,
                                             const std::vector<int>& order,
                                             double lambda) const {
    if (order.empty()) throw DataError("loss: empty window list");
    const int d_vars = cfg_.n_vars;
    const int s_len = cfg_.horizon;
    if (windows.n_vars() != d_vars || windows.horizon() != s_len ||
        windows.lookback() != cfg_.lookback) {
        throw DataError("loss: window set does not match the model shape");
    }

    std::vector<Var> rows_pred;
    rows_pred.reserve(order.size() * static_cast<std::size_t>(d_vars));
    Eigen::MatrixXd target(static_cast<Eigen::Index>(order.size()) * d_vars, s_len);
    Eigen::Index r = 0;
    for (int k : order) {
        if (k < 0 || k >= windows.size()) throw DataError("loss: window index out of range");
        std::vector<Var> preds = forward_window(t, b, windows.history(k));
        Eigen::MatrixXd fut = windows.future(k);
        for (int i = 0; i < d_vars; ++i) {
            rows_pred.push_back(preds[static_cast<std::size_t>(i)]);
            target.row(r++) = fut.col(i).transpose();
        }
    }
    Var stacked = t.concat_rows(rows_pred);
    Var mse = t.mse_to(stacked, target);

    LossParts parts;
    parts.mse = t.val(mse)(0, 0);
    if (cfg_.use_prior && lambda != 0.0) {
        auto V = [&](int k) { return b.vars[static_cast<std::size_t>(k)]; };
        Var reg = t.add(t.add(t.bce_offdiag(V(idx_.w_dcs), priors_.dcs),
                              t.bce_offdiag(V(idx_.w_ccs), priors_.ccs)),
                        t.bce_offdiag(V(idx_.w_sp), priors_.sp));
        parts.reg = t.val(reg)(0, 0);
        parts.total = t.add(mse, t.scale(reg, lambda));
    } else {
        parts.reg = 0.0;
        parts.total = mse;
    }
    return parts;
}

Eigen::MatrixXd ForecastModel::predict(const Eigen::MatrixXd& history) const {
    Tape t;
    Bound b = bind(t, false);
    std::vector<Var> preds = forward_window(t, b, history);
    Eigen::MatrixXd out(cfg_.horizon, cfg_.n_vars);
    for (int i = 0; i < cfg_.n_vars; ++i) {
        out.col(i) = t.val(preds[static_cast<std::size_t>(i)]).row(0).transpose();
    }
    return out;
}

Eigen::MatrixXd ForecastModel::gate_matrix(const std::string& which) const {
    const Eigen::MatrixXd* logits = nullptr;
    if (which == "dcs") logits = &params_[static_cast<std::size_t>(idx_.w_dcs)].value;
    else if (which == "ccs") logits = &params_[static_cast<std::size_t>(idx_.w_ccs)].value;
    else if (which == "sp") logits = &params_[static_cast<std::size_t>(idx_.w_sp)].value;
    else throw ConfigError("gate_matrix: unknown adapter '" + which + "'");
    return logits->unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
}

}  // namespace causalts
