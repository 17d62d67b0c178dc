#ifndef CAUSALTS_MODEL_HPP
#define CAUSALTS_MODEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "causalts/roles.hpp"
#include "causalts/series.hpp"
#include "causalts/tape.hpp"

namespace causalts {

// Architecture and ablation switches for the forecaster.
struct ModelConfig {
    int n_vars = 0;    // D
    int lookback = 8;  // history length T
    int horizon = 4;   // forecast length S
    int dim = 16;      // token width d
    int enc_width = 16;
    int layers = 1;
    int heads = 1;
    int ffn_mult = 4;
    std::string backbone = "transformer";  // "transformer" | "mlp"
    bool pe_restart = true;   // positional encoding restarts per segment
    bool readout_mean = false;  // mean over target-stream tokens instead of last
    double alpha = 1.0;  // adapter logit init inside the prior
    double beta = 1.0;   // adapter logit init outside the prior (negated)
    bool learn_logits = true;          // false: adapter stays at its init
    bool use_prior = true;             // false: zero logit init, regularizer off
    bool use_dcs = true;               // false: direct-cause context zeroed
    bool use_ccs = true;               // false: collider context zeroed
    bool segment_mask = true;          // false: plain causal mask over all tokens
    bool use_spouse_projection = true;  // subtract the spouse-predictable part

    void validate() const;  // throws ConfigError
};

// One named parameter with its optimizer state.
struct ParamTensor {
    std::string name;
    Eigen::MatrixXd value;
    Eigen::MatrixXd adam_m;
    Eigen::MatrixXd adam_v;
    bool trainable = true;
};

// Multivariate forecaster with a causal-role adapter in front of a
// segment-masked sequence backbone.
//
// Per window: every (variable, time) scalar is embedded by a shared pointwise
// MLP, giving D blocks of T tokens. Three linear heads project the tokens into
// direct-cause, collider and spouse spaces. For target i, sigmoid gates over
// the adapter logits mix the projected blocks into a direct-cause context and
// a collider context (T tokens each); together with the target's own token
// block they form a 3T-token stream [direct; collider; own]. Attention within
// the stream is restricted so the two context segments are causal within
// themselves and only the own-history segment reads across segments. The last
// own-history position is read out into a linear forecast head. A separate
// spouse head predicts the component of the raw forecast explainable from
// spouse context alone, and that component is subtracted from the output.
class ForecastModel {
public:
    ForecastModel(ModelConfig cfg, PriorMasks priors, std::uint64_t seed);

    const ModelConfig& config() const { return cfg_; }
    const PriorMasks& priors() const { return priors_; }
    std::vector<ParamTensor>& params() { return params_; }
    const std::vector<ParamTensor>& params() const { return params_; }
    std::size_t parameter_count(bool trainable_only = true) const;

    // Parameters registered as tape leaves, in params() order.
    struct Bound {
        std::vector<Var> vars;
    };
    Bound bind(Tape& tape, bool with_grads) const;

    // Forecasts for every target from one normalized lookback x D history.
    // Element i is 1 x horizon. The spouse correction is subtracted inside;
    // note it is not idempotent — feeding a corrected forecast back through
    // the head would subtract a further correction.
    std::vector<Var> forward_window(Tape& tape, const Bound& b,
                                    const Eigen::MatrixXd& history) const;

    // Backbone output (3T x d) for one target's stream; the rows are
    // [direct-cause; collider; own] segments in time order. Exposed so tests
    // can assert that tokens at earlier times are bitwise independent of
    // later inputs under the segment mask.
    Var encode_stream(Tape& tape, const Bound& b, const Eigen::MatrixXd& history,
                      int target) const;

    // Token embeddings ((D*T) x d, variable-major blocks) for one history,
    // without gradients. Exposed for encoder property tests.
    Eigen::MatrixXd encode_tokens(const Eigen::MatrixXd& history) const;

    // Replace the attention layout (diagnostic hook; the mask-sensitivity
    // probe swaps in an all-ones layout to prove the mask is wired in).
    void override_attention_mask(Eigen::MatrixXi allow);

    struct LossParts {
        Var total;
        double mse = 0.0;
        double reg = 0.0;
    };
    // Mean squared error over the listed windows (all targets, full horizon)
    // plus lambda * (sum of the three off-diagonal adapter regularizers).
    LossParts loss(Tape& tape, const Bound& b, const WindowSet& windows,
                   const std::vector<int>& order, double lambda) const;

    // Forecast matrix (horizon x D) for one history window, no gradients.
    Eigen::MatrixXd predict(const Eigen::MatrixXd& history) const;

    // Attention layouts over the 3T-token stream: allow(r, c) != 0 lets row r
    // attend to column c.
    static Eigen::MatrixXi build_segment_mask(int t_len);
    static Eigen::MatrixXi causal_mask(int n);

    // Positional encoding rows actually added to the stream (3T x d).
    const Eigen::MatrixXd& positional_encoding() const { return pe_; }

    // Current sigmoid gate matrix of one adapter ("dcs" | "ccs" | "sp").
    Eigen::MatrixXd gate_matrix(const std::string& which) const;

private:
    struct LayerIdx {
        // No key bias: a shared shift on every key adds the same constant to
        // each attention row's scores, which softmax ignores, so such a
        // parameter could never receive gradient or affect the output.
        int ln1_g, ln1_b, wq, bq, wk, wv, bv, wo, bo;
        int ln2_g, ln2_b, f_w1, f_b1, f_w2, f_b2;
    };
    struct Layout {
        int enc_w1, enc_b1, enc_w2, enc_b2, enc_w3, enc_b3;
        int gd_w, gd_b, gc_w, gc_b, gs_w, gs_b;
        int w_dcs, w_ccs, w_sp;
        std::vector<LayerIdx> layers;
        int final_g, final_b;
        int pred_w, pred_b;
        int sp_w1, sp_b1, sp_w2, sp_b2;
    };

    struct SharedEnc {
        Var tokens, bd, bc, bs;
    };

    int add_param(const std::string& name, Eigen::MatrixXd value, bool trainable);
    Var backbone_stack(Tape& tape, const Bound& b, Var stream) const;
    SharedEnc encode_shared(Tape& tape, const Bound& b,
                            const Eigen::MatrixXd& history) const;
    Var stream_encode(Tape& tape, const Bound& b, const SharedEnc& enc,
                      int target) const;

    ModelConfig cfg_;
    PriorMasks priors_;
    Layout idx_;
    std::vector<ParamTensor> params_;
    Eigen::MatrixXd pe_;        // 3T x d as added (restart handled at build)
    Eigen::MatrixXi attn_mask_;  // 3T x 3T
};

}  // namespace causalts

#endif
