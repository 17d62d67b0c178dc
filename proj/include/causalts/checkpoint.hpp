#ifndef CAUSALTS_CHECKPOINT_HPP
#define CAUSALTS_CHECKPOINT_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "causalts/model.hpp"

namespace causalts {

// Self-describing text container for a trained forecaster: model config,
// prior masks, variable names, the train-split normalizer, and every named
// parameter tensor at full double precision. Written with %.17g so a
// save/load round trip is bit-exact.
struct Checkpoint {
    ModelConfig config;
    PriorMasks priors;
    std::vector<std::string> names;
    Eigen::VectorXd norm_mean;
    Eigen::VectorXd norm_std;
    std::vector<std::pair<std::string, Eigen::MatrixXd>> tensors;
};

void save_checkpoint(const std::string& path, const ForecastModel& model,
                     const std::vector<std::string>& names,
                     const Eigen::VectorXd& norm_mean,
                     const Eigen::VectorXd& norm_std);

// Throws MissingArtifactError when the file does not exist, DataError on a
// malformed file.
Checkpoint load_checkpoint(const std::string& path);

// Rebuilds the model and overwrites its parameters with the stored tensors.
// Throws DataError when tensor names or shapes do not line up.
ForecastModel model_from_checkpoint(const Checkpoint& ckpt);

}  // namespace causalts

#endif
