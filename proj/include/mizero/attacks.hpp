#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mizero/condensation.hpp"
#include "mizero/evaluation.hpp"

namespace mizero {

enum class AttackKind { upper_lower, misspelling, number, add_paragraph, rewrite };

std::string to_string(AttackKind k);
AttackKind attack_kind_from_string(const std::string& s);

struct AttackConfig {
    AttackKind kind = AttackKind::upper_lower;
    double rate = 0.30; // per-unit probability (chars for case flips, tokens otherwise)
    std::uint64_t seed = 0;
    LlmClient* rewrite_client = nullptr; // required for rewrite
    bool budget_mode = false;            // treat rate as a fraction-of-length budget
};

// Seeded text perturbation. Deterministic for everything but a live rewrite
// client.
std::string perturb(const std::string& text, const AttackConfig& config);

// correct spelling -> common misspelling
const std::map<std::string, std::string>& misspelling_lexicon();
// word -> style-neutral synonym, used by the offline rewrite stub
const std::map<std::string, std::string>& rewrite_thesaurus();

// Offline rewrite backend: synonym substitution at the configured rate,
// sentence order preserved.
class StubRewriteClient : public LlmClient {
public:
    StubRewriteClient(double rate, std::uint64_t seed) : rate_(rate), seed_(seed) {}
    std::string complete(const std::string& prompt) override;
    std::string id() const override { return "stub-rewrite"; }

private:
    double rate_;
    std::uint64_t seed_;
};

struct AttackOutcome {
    AttackKind kind = AttackKind::upper_lower;
    MetricsRecord metrics;
    double f1_delta = 0.0; // attacked minus clean
    double tpr_delta = 0.0;
    double fpr_delta = 0.0;
};

struct AttackEvaluation {
    MetricsRecord clean;
    std::vector<AttackOutcome> outcomes;
};

// Verifies the test set clean, then once per attack, reporting deltas.
AttackEvaluation attack_evaluation(const std::vector<const StyleSample*>& test_samples,
                                   const std::vector<AttackKind>& kinds, const Verifier& verifier,
                                   LlmClient& condense_client, double rate, std::uint64_t seed,
                                   LlmClient* rewrite_client, CondenseCache* cache = nullptr);

} // namespace mizero
