#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "mizero/common.hpp"

namespace mizero {

enum class EncoderBackend {
    pretrained_sentence_encoder, // parameters come from an external checkpoint
    deterministic_hash_encoder,  // fixed featurizer + frozen head, offline
    trainable_hash_encoder       // fixed featurizer + trainable head, offline
};

std::string to_string(EncoderBackend b);
EncoderBackend encoder_backend_from_string(const std::string& s);

struct EncoderConfig {
    EncoderBackend backend = EncoderBackend::trainable_hash_encoder;
    int dim = 64;          // embedding width
    int la = 1;            // head layer count
    bool trainable = true; // forced false for deterministic_hash_encoder
    std::uint64_t seed = 17;
    std::string checkpoint_ref; // required for pretrained_sentence_encoder
    std::size_t max_chars = 4096;
};

struct FeatureVector {
    Eigen::VectorXd values; // unit L2 norm
    std::string source_id;
};

double cosine_similarity(const FeatureVector& a, const FeatureVector& b);

// Sentence encoder E: char-trigram signed-hash counts, a fixed seeded random
// projection to `dim`, then `la` tanh layers and L2 normalization. The hash
// featurizer and projection are immutable; only the tanh layers are
// trainable (when the backend allows it).
class Encoder {
public:
    explicit Encoder(const EncoderConfig& config);
    static Encoder load_checkpoint(const std::string& path);
    void save_checkpoint(const std::string& path) const;

    FeatureVector encode(const std::string& text, const std::string& source_id = "") const;

    struct Trace {
        Eigen::VectorXd h;              // projected featurizer output
        std::vector<Eigen::VectorXd> z; // per-layer tanh outputs
        Eigen::VectorXd e;              // normalized embedding
        bool truncated = false;
    };
    Trace encode_traced(const std::string& text) const;

    // Adds dL/dA_k to grads given dL/de at this trace. grads must have one
    // matrix per layer, shaped like layers().
    void accumulate_grad(const Trace& trace, const Eigen::VectorXd& de,
                         std::vector<Eigen::MatrixXd>& grads) const;

    const std::vector<Eigen::MatrixXd>& parameters() const { return layers_; }
    std::vector<Eigen::MatrixXd> zero_grads() const;

    // params -= lr * grads. Throws ContractError on a frozen backend.
    void apply_gradient_update(const std::vector<Eigen::MatrixXd>& grads, double lr);

    bool trainable() const { return config_.trainable; }
    const EncoderConfig& config() const { return config_; }
    std::string fingerprint() const;
    std::size_t truncation_count() const { return truncations_; }

private:
    Eigen::VectorXd featurize(const std::string& text) const; // cached per text

    EncoderConfig config_;
    static constexpr int kBuckets = 2048;
    Eigen::MatrixXd projection_; // dim x kBuckets, fixed
    std::vector<Eigen::MatrixXd> layers_;

    mutable std::unordered_map<std::uint64_t, Eigen::VectorXd> feature_cache_;
    mutable std::size_t truncations_ = 0;
};

} // namespace mizero
