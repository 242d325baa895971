#include <doctest.h>

#include <random>

#include "mizero/evaluation.hpp"
#include "mizero/registry.hpp"
#include "mizero/synthetic.hpp"
#include "mizero/training.hpp"
#include "mizero/verification.hpp"
#include "support/oracles.hpp"

using namespace mizero;

namespace {

struct Trained {
    Corpus corpus;
    TrainingConfig cfg;
    TrainedArtifacts art;
    Registry reg;
};

// One shared small training run for the verification tests.
Trained& shared_run() {
    static Trained t = [] {
        Trained r{make_synthetic_corpus(12, 6, 3), {}, {}, {}};
        r.cfg.epochs = 16;
        r.cfg.episodes = 4;
        r.cfg.num = 4;
        r.cfg.len = 32;
        r.cfg.seed = 5;
        r.cfg.encoder.dim = 48;
        r.cfg.lr_encoder_start = 5e-3;
        r.cfg.lr_encoder_floor = 1e-5;
        r.cfg.lr_matrix = 5e-3;
        StubLlmClient client;
        r.art = train(r.corpus, r.cfg, client);
        r.reg = make_registry(r.art, r.cfg, "", "");
        return r;
    }();
    return t;
}

} // namespace

TEST_CASE("default epsilon is the ceiling of one percent of len") {
    CHECK(default_epsilon(100) == 1);
    CHECK(default_epsilon(128) == 2);
    CHECK(default_epsilon(16) == 1);
    CHECK(default_epsilon(256) == 3);
    CHECK(default_epsilon(1000) == 10);
}

TEST_CASE("a pp training sample verifies at hamming zero once training converges") {
    // converged benchmark-scale run; the under-trained shared run can still be
    // a bit or two away from the anchor on its own positives
    Corpus corpus = make_synthetic_corpus(200, 120, 42);
    TrainingConfig cfg;
    cfg.epochs = 50;
    cfg.episodes = 12;
    cfg.num = 10;
    cfg.len = 128;
    cfg.seed = 7;
    cfg.encoder.dim = 128;
    cfg.lr_encoder_start = 5e-3;
    cfg.lr_encoder_floor = 1e-5;
    cfg.lr_matrix = 5e-3;
    StubLlmClient client;
    auto art = train(corpus, cfg, client);
    Registry reg = make_registry(art, cfg, "", "");
    Verifier verifier(reg, art.encoder, art.matrix);
    REQUIRE_FALSE(art.final_pairs.pp.empty());
    const StyleSample& s = corpus.by_id(art.final_pairs.pp.front().first);
    auto v = verifier.verify(s.text, s.id, client);
    CHECK(v.hamming == 0);
    CHECK(v.pr == 1);
    CHECK(v.match_probability == doctest::Approx(1.0));
}

TEST_CASE("verdicts are internally consistent and deterministic") {
    auto& t = shared_run();
    StubLlmClient client;
    Verifier verifier(t.reg, t.art.encoder, t.art.matrix);
    for (const auto* s : t.corpus.subset(Split::test)) {
        auto v1 = verifier.verify(s->text, s->id, client);
        auto v2 = verifier.verify(s->text, s->id, client);
        CHECK(v1.hamming == v2.hamming);
        CHECK(v1.nearest_train_id == v2.nearest_train_id);
        CHECK(v1.prompt_kind == v2.prompt_kind);
        // Eq. 1 and the Eq. 11 reading agree
        CHECK(v1.pr == (v1.hamming < v1.epsilon ? 1 : 0));
        double mp = 1.0 - static_cast<double>(v1.hamming) / t.cfg.len;
        CHECK(v1.match_probability == doctest::Approx(mp).epsilon(1e-12));
        CHECK((v1.pr == 1) == (v1.match_probability > 1.0 - static_cast<double>(v1.epsilon) / t.cfg.len));
    }
}

TEST_CASE("raising epsilon never flips a verdict from 1 to 0") {
    auto& t = shared_run();
    StubLlmClient client;
    Verifier verifier(t.reg, t.art.encoder, t.art.matrix);
    for (const auto* s : t.corpus.subset(Split::test)) {
        int prev = 0;
        for (int eps = 1; eps <= 8; ++eps) {
            auto v = verifier.verify(s->text, s->id, client, nullptr, eps);
            CHECK(v.epsilon == eps);
            CHECK(v.pr >= prev);
            prev = v.pr;
        }
    }
}

TEST_CASE("fingerprint mismatches are registry errors") {
    auto& t = shared_run();
    auto other_cfg = t.cfg.encoder;
    other_cfg.seed += 1;
    auto other = std::make_shared<Encoder>(other_cfg);
    CHECK_THROWS_AS(Verifier(t.reg, other, t.art.matrix), RegistryError);

    auto other_matrix = std::make_shared<WatermarkMatrix>(t.cfg.len, t.cfg.encoder.dim,
                                                          t.cfg.seed + 123);
    CHECK_THROWS_AS(Verifier(t.reg, t.art.encoder, other_matrix), RegistryError);
}

TEST_CASE("batch verification tallies a hand-labeled toy batch") {
    auto& t = shared_run();
    StubLlmClient client;
    Verifier verifier(t.reg, t.art.encoder, t.art.matrix);
    auto pos = t.corpus.subset(Split::test, Label::protected_style);
    auto neg = t.corpus.subset(Split::test, Label::unprotected_style);
    REQUIRE(pos.size() >= 2);
    REQUIRE(neg.size() >= 2);
    std::vector<const StyleSample*> batch = {pos[0], pos[1], neg[0], neg[1]};
    auto res = verifier.batch_verify(batch, client);
    REQUIRE(res.failures.empty());
    REQUIRE(res.verdicts.size() == 4);

    // recompute the confusion matrix by hand from the verdicts
    ConfusionCounts hand;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        bool is_pos = batch[i]->label == Label::protected_style;
        if (res.verdicts[i].pr == 1)
            (is_pos ? hand.tp : hand.fp)++;
        else
            (is_pos ? hand.fn : hand.tn)++;
    }
    CHECK(res.confusion.tp == hand.tp);
    CHECK(res.confusion.fp == hand.fp);
    CHECK(res.confusion.tn == hand.tn);
    CHECK(res.confusion.fn == hand.fn);
    // verdict order matches input order
    for (std::size_t i = 0; i < batch.size(); ++i) CHECK(res.verdicts[i].test_id == batch[i]->id);
}

TEST_CASE("all-positive batches leave FPR not-applicable") {
    auto& t = shared_run();
    StubLlmClient client;
    Verifier verifier(t.reg, t.art.encoder, t.art.matrix);
    auto pos = t.corpus.subset(Split::test, Label::protected_style);
    auto res = verifier.batch_verify(pos, client);
    CHECK(res.confusion.fp + res.confusion.tn == 0);
    auto m = metrics_from_confusion(res.confusion);
    CHECK_FALSE(m.fpr.has_value());
    CHECK(m.tpr.has_value());
}

TEST_CASE("random watermark bits sit near match probability one half") {
    auto& t = shared_run();
    std::mt19937_64 rng(99);
    const int len = static_cast<int>(t.reg.bits.size());
    double mp_sum = 0.0;
    const int trials = 2000;
    int pr_hits = 0;
    for (int i = 0; i < trials; ++i) {
        auto bits = oracle::random_bits(rng, len);
        int h = hamming_distance(bits, t.reg.bits);
        mp_sum += 1.0 - static_cast<double>(h) / len;
        pr_hits += h < t.reg.epsilon;
    }
    CHECK(mp_sum / trials == doctest::Approx(0.5).epsilon(0.05));
    CHECK(pr_hits == 0); // an unrelated watermark never clears the 1% threshold
}

TEST_CASE("registry save/load round trip preserves the verification stack") {
    auto& t = shared_run();
    std::string path = "registry_roundtrip_test.json";
    t.reg.save(path);
    Registry back = Registry::load(path);
    CHECK(back.bits == t.reg.bits);
    CHECK(back.epsilon == t.reg.epsilon);
    CHECK(back.encoder_fingerprint == t.reg.encoder_fingerprint);
    CHECK(back.matrix_fingerprint == t.reg.matrix_fingerprint);
    CHECK(back.snapshot_samples.size() == t.reg.snapshot_samples.size());

    StubLlmClient client;
    Verifier a(t.reg, t.art.encoder, t.art.matrix);
    Verifier b(back, t.art.encoder, t.art.matrix);
    const StyleSample* s = t.corpus.subset(Split::test)[0];
    CHECK(a.verify(s->text, s->id, client).hamming == b.verify(s->text, s->id, client).hamming);
    std::remove(path.c_str());
}
