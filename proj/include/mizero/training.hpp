#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mizero/condensation.hpp"
#include "mizero/corpus.hpp"
#include "mizero/delimitation.hpp"
#include "mizero/encoder.hpp"
#include "mizero/watermark.hpp"

namespace mizero {

enum class Ablation { none, drop_lcon, drop_lo, drop_condensation, freeze_alpha, drop_qp };

std::string to_string(Ablation a);
Ablation ablation_from_string(const std::string& s);

struct TrainingConfig {
    int epochs = 20;
    int episodes = 1;
    int num = 10;
    int len = 128;
    double sigma = 0.5;
    double margin_m = 1.0;
    double lr_encoder_start = 5e-5;
    double lr_encoder_floor = 1e-7;
    double lr_matrix = 1e-5;
    double weight_decay = 0.0;
    // Eq.-style BCE uses the real anchor as target; the hard variant
    // binarizes it first, which builds per-bit margin.
    bool bce_hard_target = false;
    double soft_ce_temperature = 0.1;
    std::uint64_t seed = 7;
    EncoderConfig encoder;
    double matrix_init_scale = 0.5;
    Ablation ablation = Ablation::none;
    std::string cache_dir; // empty: no on-disk condensation cache

    void validate() const;
};

struct EpisodeRecord {
    int epoch = 0;
    int episode = 0;
    double l_ce = 0.0; // soft relaxation, the component summed into l_total
    double l_con = 0.0;
    double l_w = 0.0;
    double l_o = 0.0;
    double l_total = 0.0;
    double hard_ce = 0.0; // Eq.-style hard pseudo-label value, reporting only
    int pp_size = 0;
    int neg_size = 0;
};

struct TrainingReport {
    std::vector<EpisodeRecord> records;
    std::string ablation = "none";
    double elapsed_sec = 0.0;
    std::size_t cache_hits = 0;
    std::size_t cache_misses = 0;

    // mean L_o per epoch, the convergence curve
    std::vector<double> lo_curve() const;
};

struct TrainedArtifacts {
    std::shared_ptr<Encoder> encoder;
    std::shared_ptr<WatermarkMatrix> matrix;
    WatermarkAnchor anchor;
    TrainingReport report;
    PairSets final_pairs;
    // final-episode snapshot used by verification's nearest-neighbor step
    std::vector<StyleSample> snapshot_samples;
    std::vector<FeatureVector> snapshot_features;
};

TrainedArtifacts train(const Corpus& corpus, const TrainingConfig& config, LlmClient& client,
                       CondenseCache* cache = nullptr);

// Single-component ablation run; delegates to train() with the component
// disabled and flags the report.
TrainedArtifacts ablate(const Corpus& corpus, TrainingConfig config, Ablation drop,
                        LlmClient& client, CondenseCache* cache = nullptr);

// AdamW over a list of Eigen matrices.
class AdamW {
public:
    AdamW(double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8,
          double weight_decay = 0.0);
    // Returns the update direction (to be scaled by lr), including the
    // decoupled weight-decay term for `params`.
    std::vector<Eigen::MatrixXd> step(const std::vector<Eigen::MatrixXd>& grads,
                                      const std::vector<Eigen::MatrixXd>& params);

private:
    double beta1_, beta2_, eps_, weight_decay_;
    long t_ = 0;
    std::vector<Eigen::MatrixXd> m_, v_;
};

double cosine_decay_lr(double start, double floor, long step, long total_steps);

} // namespace mizero
