#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "mizero/corpus.hpp"
#include "mizero/training.hpp"

namespace mizero {

// ceil of 1% of the watermark length
int default_epsilon(int len);

// The defender's portable proof artifact: the anchor, its bits, the decision
// threshold, parameter fingerprints, and the training snapshot used by the
// nearest-neighbor step at verification time.
struct Registry {
    std::string style_id;
    int len = 0;
    Eigen::VectorXd anchor;
    std::vector<uint8_t> bits;
    int epsilon = 1;
    double sigma = 0.5;
    std::string encoder_fingerprint;
    std::string matrix_fingerprint;
    std::string encoder_path; // relative to the registry file
    std::string matrix_path;
    bool condensation_enabled = true; // false when trained with -C
    bool qp_enabled = true;           // false when trained with -q_p
    std::vector<StyleSample> snapshot_samples;
    std::vector<Eigen::VectorXd> snapshot_features;
    nlohmann::json training_manifest;

    void save(const std::string& path) const;
    static Registry load(const std::string& path);
};

Registry make_registry(const TrainedArtifacts& artifacts, const TrainingConfig& config,
                       const std::string& encoder_path, const std::string& matrix_path);

} // namespace mizero
