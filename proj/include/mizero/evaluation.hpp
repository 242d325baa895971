#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "mizero/verification.hpp"

namespace mizero {

struct MetricsRecord {
    int tp = 0, fp = 0, tn = 0, fn = 0;
    std::optional<double> tpr; // absent when no positives evaluated
    std::optional<double> fpr; // absent when no negatives evaluated
    double f1 = 0.0;
    nlohmann::json metadata = nlohmann::json::object();

    int total() const { return tp + fp + tn + fn; }
};

MetricsRecord metrics_from_confusion(const ConfusionCounts& c);

// verdicts and labels aligned by index; label true = protected.
MetricsRecord compute_metrics(const std::vector<VerificationVerdict>& verdicts,
                              const std::vector<bool>& labels);

struct SweepPoint {
    double threshold = 0.0;
    MetricsRecord metrics;
    bool cap_violated = false;
};

// Finds the decision threshold on match probability that maximizes TPR
// subject to empirical FPR <= fpr_cap (classify positive iff mp >= threshold).
SweepPoint threshold_sweep(const std::vector<double>& match_probabilities,
                           const std::vector<bool>& labels, double fpr_cap);

// Trains on the corpus train split and verifies the test split.
struct BenchmarkResult {
    MetricsRecord metrics;
    TrainingReport report;
    std::vector<VerificationVerdict> verdicts;
    std::vector<bool> labels;
};
BenchmarkResult run_benchmark(const Corpus& corpus, const TrainingConfig& config,
                              LlmClient& client, CondenseCache* cache = nullptr,
                              std::optional<int> epsilon_override = std::nullopt);

struct BitLengthPoint {
    int len = 0;
    MetricsRecord metrics;
    std::string error; // non-empty when this point failed
};
std::vector<BitLengthPoint> bit_length_study(const Corpus& corpus, std::vector<int> lens,
                                             TrainingConfig config, LlmClient& client,
                                             CondenseCache* cache = nullptr);

struct SampleSizePoint {
    int num = 0;
    MetricsRecord metrics;
    bool decline_region = false; // num >= 50
    std::string error;
};
std::vector<SampleSizePoint> sample_size_study(const Corpus& corpus, std::vector<int> nums,
                                               TrainingConfig config, LlmClient& client,
                                               CondenseCache* cache = nullptr);

} // namespace mizero
