#include <doctest.h>

#include <random>

#include "mizero/evaluation.hpp"
#include "mizero/synthetic.hpp"

using namespace mizero;

namespace {

TrainingConfig tiny_config() {
    TrainingConfig cfg;
    cfg.epochs = 3;
    cfg.episodes = 2;
    cfg.num = 4;
    cfg.len = 16;
    cfg.seed = 5;
    cfg.encoder.dim = 24;
    cfg.lr_encoder_start = 1e-3;
    cfg.lr_encoder_floor = 1e-5;
    cfg.lr_matrix = 1e-3;
    return cfg;
}

std::vector<VerificationVerdict> verdicts_from(const std::vector<int>& prs) {
    std::vector<VerificationVerdict> out;
    for (int pr : prs) {
        VerificationVerdict v;
        v.pr = pr;
        out.push_back(v);
    }
    return out;
}

} // namespace

TEST_CASE("all-correct metrics") {
    auto m = compute_metrics(verdicts_from({1, 1, 0, 0}), {true, true, false, false});
    CHECK(m.f1 == doctest::Approx(1.0));
    REQUIRE(m.fpr.has_value());
    CHECK(*m.fpr == doctest::Approx(0.0));
    REQUIRE(m.tpr.has_value());
    CHECK(*m.tpr == doctest::Approx(1.0));
    CHECK(m.total() == 4);
}

TEST_CASE("confusion arithmetic matches the defining formulas") {
    ConfusionCounts c{96, 5, 95, 4};
    auto m = metrics_from_confusion(c);
    CHECK(*m.tpr == doctest::Approx(0.96));
    CHECK(*m.fpr == doctest::Approx(0.05));
    CHECK(m.f1 == doctest::Approx(2.0 * 96 / (2.0 * 96 + 5 + 4)).epsilon(1e-12));
}

TEST_CASE("guard cases: absent classes and misaligned inputs") {
    auto m = compute_metrics(verdicts_from({1, 0}), {true, true});
    CHECK_FALSE(m.fpr.has_value()); // no negatives -> not-applicable, not 0
    auto m2 = compute_metrics(verdicts_from({0, 0}), {false, false});
    CHECK_FALSE(m2.tpr.has_value());
    CHECK_THROWS_AS(compute_metrics(verdicts_from({1}), {true, false}), ContractError);
}

TEST_CASE("threshold sweep on perfectly separated scores reaches TPR 1") {
    std::vector<double> mp = {0.99, 0.98, 0.97, 0.10, 0.05, 0.02};
    std::vector<bool> labels = {true, true, true, false, false, false};
    for (double cap : {0.10, 0.01}) {
        auto pt = threshold_sweep(mp, labels, cap);
        CHECK_FALSE(pt.cap_violated);
        REQUIRE(pt.metrics.tpr.has_value());
        CHECK(*pt.metrics.tpr == doctest::Approx(1.0));
        CHECK(*pt.metrics.fpr <= cap);
    }
}

TEST_CASE("8-point sweep matches the exhaustive scan") {
    std::vector<double> mp = {0.95, 0.90, 0.80, 0.75, 0.60, 0.55, 0.40, 0.20};
    std::vector<bool> labels = {true, true, false, true, true, false, false, false};
    double cap = 0.34; // allows exactly one of three negatives above threshold

    // brute force: try every observed score as a cut, keep max TPR under cap
    double best_tpr = -1.0, best_thr = 0.0;
    for (double thr : mp) {
        int tp = 0, fp = 0, fn = 0, tn = 0;
        for (std::size_t i = 0; i < mp.size(); ++i) {
            bool pos = mp[i] >= thr;
            if (pos)
                (labels[i] ? tp : fp)++;
            else
                (labels[i] ? fn : tn)++;
        }
        double fpr = static_cast<double>(fp) / (fp + tn);
        double tpr = static_cast<double>(tp) / (tp + fn);
        if (fpr <= cap && (tpr > best_tpr || (tpr == best_tpr && thr < best_thr))) {
            best_tpr = tpr;
            best_thr = thr;
        }
    }
    auto pt = threshold_sweep(mp, labels, cap);
    CHECK(pt.threshold == doctest::Approx(best_thr));
    CHECK(*pt.metrics.tpr == doctest::Approx(best_tpr));
    CHECK_FALSE(pt.cap_violated);
}

TEST_CASE("degenerate sweep falls back to predicting nothing") {
    // positives and negatives share one score; only the sentinel satisfies the cap
    std::vector<double> mp = {0.9, 0.9, 0.9, 0.9};
    std::vector<bool> labels = {true, true, false, false};
    auto pt = threshold_sweep(mp, labels, 0.01);
    CHECK(*pt.metrics.fpr <= 0.01);
    CHECK(*pt.metrics.tpr == doctest::Approx(0.0));
    CHECK_THROWS_AS(threshold_sweep(mp, labels, 0.0), ContractError);
    CHECK_THROWS_AS(threshold_sweep({}, {}, 0.1), ContractError);
}

TEST_CASE("bit-length study rejects single-length sweeps and dedupes") {
    Corpus corpus = make_synthetic_corpus(12, 4, 3);
    StubLlmClient client;
    CHECK_THROWS_AS(bit_length_study(corpus, {64}, tiny_config(), client), ContractError);
    CHECK_THROWS_AS(bit_length_study(corpus, {64, 64}, tiny_config(), client), ContractError);

    auto pts = bit_length_study(corpus, {16, 32, 16}, tiny_config(), client);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].len == 16);
    CHECK(pts[1].len == 32);
    for (const auto& p : pts) CHECK(p.error.empty());

    // identical seeds and lengths reproduce identical counts
    auto again = bit_length_study(corpus, {16, 32}, tiny_config(), client);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(pts[i].metrics.tp == again[i].metrics.tp);
        CHECK(pts[i].metrics.fp == again[i].metrics.fp);
        CHECK(pts[i].metrics.tn == again[i].metrics.tn);
        CHECK(pts[i].metrics.fn == again[i].metrics.fn);
    }
}

TEST_CASE("sample-size study dedupes, flags the decline region, and survives capacity errors") {
    Corpus corpus = make_synthetic_corpus(12, 4, 3);
    StubLlmClient client;
    CHECK_THROWS_AS(sample_size_study(corpus, {4, 4}, tiny_config(), client), ContractError);

    auto pts = sample_size_study(corpus, {4, 6, 4, 50}, tiny_config(), client);
    REQUIRE(pts.size() == 3);
    CHECK(pts[0].num == 4);
    CHECK(pts[1].num == 6);
    CHECK(pts[2].num == 50);
    CHECK_FALSE(pts[0].decline_region);
    CHECK(pts[2].decline_region);
    // num=50 exceeds the 12-per-class corpus: the point errors, the sweep survives
    CHECK_FALSE(pts[2].error.empty());
    CHECK(pts[0].error.empty());
}

TEST_CASE("benchmark labels align with verdicts") {
    Corpus corpus = make_synthetic_corpus(12, 4, 3);
    StubLlmClient client;
    auto res = run_benchmark(corpus, tiny_config(), client);
    REQUIRE(res.verdicts.size() == res.labels.size());
    CHECK(res.verdicts.size() == corpus.subset(Split::test).size());
    auto m = compute_metrics(res.verdicts, res.labels);
    CHECK(m.tp == res.metrics.tp);
    CHECK(m.fp == res.metrics.fp);
    CHECK(m.f1 == doctest::Approx(res.metrics.f1));
}
