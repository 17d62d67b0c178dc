#ifndef CAUSALTS_RUNCONFIG_HPP
#define CAUSALTS_RUNCONFIG_HPP

#include <cstdint>
#include <string>

#include "causalts/series.hpp"

namespace causalts {

// Line-oriented `key = value` run configuration. Blank lines and lines whose
// first non-space character is '#' are ignored; unknown keys are rejected so a
// typo cannot silently fall back to a default. Every run writes the fully
// resolved configuration (sorted keys, canonical number formatting) next to
// its outputs, and command-line flags override file keys.
struct RunConfig {
    std::string data_path;  // data.path
    SplitSpec split;        // split.train / split.val / split.test

    int lookback = 8;  // window.lookback
    int horizon = 4;   // window.horizon
    int stride = 1;    // window.stride

    double pc_alpha = 0.05;  // pc.alpha
    int granger_lag = 4;     // granger.lag

    double adapter_alpha = 2.0;  // adapter.alpha
    double adapter_beta = 3.0;   // adapter.beta

    double lr = 2e-3;                     // train.lr
    int batch = 32;                       // train.batch
    int epochs = 30;                      // train.epochs
    int patience = 8;                     // train.patience
    double lambda = 0.2;                  // train.lambda
    std::uint64_t seed = 0;               // train.seed
    std::string backbone = "transformer"; // train.backbone

    std::string out_dir = "out";  // out.dir

    int model_dim = 16;   // model.dim
    int enc_width = 16;   // model.enc_width
    int layers = 1;       // model.layers
    int heads = 1;        // model.heads

    int exp_seeds = 5;          // exp.seeds
    int exp_rows = 960;         // exp.rows
    double exp_obs_noise = 0.5; // exp.obs_noise

    // Throws ConfigError on unknown key or unparsable value.
    void set_key(const std::string& key, const std::string& value);
    void validate() const;

    // Sorted `key = value` lines, one per key, ending with a newline.
    std::string to_text() const;
    void write(const std::string& path) const;

    // Throws ConfigError when the file is missing or malformed.
    static RunConfig from_file(const std::string& path);
};

}  // namespace causalts

#endif
