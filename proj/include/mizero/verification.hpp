#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mizero/registry.hpp"

namespace mizero {

struct VerificationVerdict {
    std::string test_id;
    double match_probability = 0.0; // 1 - hamming/len
    int hamming = 0;
    int epsilon = 1;
    int pr = 0; // 1 iff hamming < epsilon
    std::string nearest_train_id;
    PromptKind prompt_kind = PromptKind::q_n;
};

struct ConfusionCounts {
    int tp = 0, fp = 0, tn = 0, fn = 0;
};

struct BatchVerifyResult {
    std::vector<VerificationVerdict> verdicts; // input order, failed samples omitted
    ConfusionCounts confusion;
    std::vector<std::pair<std::string, std::string>> failures; // (id, error)
};

class Verifier {
public:
    // Throws RegistryError when the registry fingerprints do not match the
    // supplied encoder/matrix.
    Verifier(Registry registry, std::shared_ptr<const Encoder> encoder,
             std::shared_ptr<const WatermarkMatrix> matrix);

    VerificationVerdict verify(const std::string& test_text, const std::string& test_id,
                               LlmClient& client, CondenseCache* cache = nullptr,
                               std::optional<int> epsilon_override = std::nullopt) const;

    BatchVerifyResult batch_verify(const std::vector<const StyleSample*>& test_samples,
                                   LlmClient& client, CondenseCache* cache = nullptr,
                                   std::optional<int> epsilon_override = std::nullopt) const;

    const Registry& registry() const { return registry_; }

private:
    Registry registry_;
    std::shared_ptr<const Encoder> encoder_;
    std::shared_ptr<const WatermarkMatrix> matrix_;
};

} // namespace mizero
