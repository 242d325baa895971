#include "mizero/verification.hpp"

namespace mizero {

Verifier::Verifier(Registry registry, std::shared_ptr<const Encoder> encoder,
                   std::shared_ptr<const WatermarkMatrix> matrix)
    : registry_(std::move(registry)), encoder_(std::move(encoder)), matrix_(std::move(matrix)) {
    if (encoder_->fingerprint() != registry_.encoder_fingerprint)
        throw RegistryError("verifier: encoder fingerprint mismatch");
    if (matrix_->fingerprint() != registry_.matrix_fingerprint)
        throw RegistryError("verifier: matrix fingerprint mismatch");
    if (registry_.snapshot_samples.empty())
        throw RegistryError("verifier: registry has no training snapshot");
}

VerificationVerdict Verifier::verify(const std::string& test_text, const std::string& test_id,
                                     LlmClient& client, CondenseCache* cache,
                                     std::optional<int> epsilon_override) const {
    VerificationVerdict v;
    v.test_id = test_id;
    v.epsilon = epsilon_override.value_or(registry_.epsilon);

    FeatureVector test_fv = encoder_->encode(test_text, test_id);

    // nearest training sample, ties broken by lowest id
    double best = -2.0;
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < registry_.snapshot_features.size(); ++i) {
        FeatureVector snap{registry_.snapshot_features[i], registry_.snapshot_samples[i].id};
        double d = cosine_similarity(test_fv, snap);
        if (d > best || (d == best && snap.source_id < registry_.snapshot_samples[best_idx].id)) {
            best = d;
            best_idx = i;
        }
    }
    const StyleSample& nearest = registry_.snapshot_samples[best_idx];
    v.nearest_train_id = nearest.id;

    Eigen::VectorXd embedded;
    if (registry_.condensation_enabled) {
        StyleSample probe;
        probe.id = test_id;
        probe.text = test_text;
        bool use_qp = registry_.qp_enabled && nearest.label == Label::protected_style &&
                      best > registry_.sigma;
        v.prompt_kind = use_qp ? PromptKind::q_p : PromptKind::q_n;
        std::string prompt = use_qp ? build_prompt(probe, &nearest, PromptKind::q_p)
                                    : build_prompt(probe, nullptr, PromptKind::q_n);
        CondensedList cl = condense(prompt, test_id, client, cache);
        embedded = encoder_->encode(cl.joined(), test_id).values;
    } else {
        v.prompt_kind = PromptKind::q_n;
        embedded = test_fv.values;
    }

    WatermarkVector wv = extract_watermark(embedded, *matrix_, test_id);
    std::vector<uint8_t> test_bits = binarize(wv.w);
    v.hamming = hamming_distance(test_bits, registry_.bits);
    v.match_probability =
        1.0 - static_cast<double>(v.hamming) / static_cast<double>(registry_.len);
    v.pr = v.hamming < v.epsilon ? 1 : 0;
    return v;
}

BatchVerifyResult Verifier::batch_verify(const std::vector<const StyleSample*>& test_samples,
                                         LlmClient& client, CondenseCache* cache,
                                         std::optional<int> epsilon_override) const {
    BatchVerifyResult out;
    for (const auto* s : test_samples) {
        try {
            VerificationVerdict v = verify(s->text, s->id, client, cache, epsilon_override);
            bool positive = s->label == Label::protected_style;
            if (v.pr == 1)
                (positive ? out.confusion.tp : out.confusion.fp)++;
            else
                (positive ? out.confusion.fn : out.confusion.tn)++;
            out.verdicts.push_back(std::move(v));
        } catch (const MizeroError& e) {
            out.failures.emplace_back(s->id, e.what());
        }
    }
    return out;
}

} // namespace mizero
