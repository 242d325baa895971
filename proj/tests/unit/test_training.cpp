#include <doctest.h>

#include <cmath>

#include "mizero/synthetic.hpp"
#include "mizero/training.hpp"

using namespace mizero;

namespace {

// Small fast configuration for structural tests.
TrainingConfig tiny_config() {
    TrainingConfig cfg;
    cfg.epochs = 2;
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

Corpus tiny_corpus() { return make_synthetic_corpus(12, 4, 3); }

} // namespace

TEST_CASE("config validation enforces the documented invariants") {
    TrainingConfig cfg = tiny_config();
    CHECK_NOTHROW(cfg.validate());

    cfg.epochs = 0;
    CHECK_THROWS_AS(cfg.validate(), ContractError);
    cfg = tiny_config();
    cfg.num = 1;
    CHECK_THROWS_AS(cfg.validate(), ContractError);
    cfg = tiny_config();
    cfg.len = 4;
    CHECK_THROWS_AS(cfg.validate(), ContractError);
    cfg = tiny_config();
    cfg.lr_matrix = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ContractError);
    cfg = tiny_config();
    cfg.lr_encoder_floor = cfg.lr_encoder_start * 10;
    CHECK_THROWS_AS(cfg.validate(), ContractError);
    cfg = tiny_config();
    cfg.margin_m = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ContractError);
}

TEST_CASE("single-episode run produces exactly one finite loss record") {
    Corpus corpus = tiny_corpus();
    TrainingConfig cfg = tiny_config();
    cfg.epochs = 1;
    cfg.episodes = 1;
    StubLlmClient client;
    auto art = train(corpus, cfg, client);
    REQUIRE(art.report.records.size() == 1);
    const auto& r = art.report.records[0];
    for (double v : {r.l_ce, r.l_con, r.l_w, r.l_o, r.l_total, r.hard_ce}) CHECK(std::isfinite(v));
    CHECK(r.pp_size + r.neg_size == 2 * cfg.num);
    CHECK(static_cast<int>(art.anchor.bits.size()) == cfg.len);
}

TEST_CASE("total loss is the sum of its four components at every step") {
    Corpus corpus = tiny_corpus();
    StubLlmClient client;
    auto art = train(corpus, tiny_config(), client);
    REQUIRE_FALSE(art.report.records.empty());
    for (const auto& r : art.report.records) {
        double sum = r.l_ce + r.l_con + r.l_w + r.l_o;
        CHECK(std::fabs(r.l_total - sum) <= 1e-9 * std::max(1.0, std::fabs(sum)));
    }
}

TEST_CASE("identical seeds reproduce bit-identical anchors") {
    Corpus corpus = tiny_corpus();
    StubLlmClient client;
    auto a = train(corpus, tiny_config(), client);
    auto b = train(corpus, tiny_config(), client);
    REQUIRE(a.anchor.bits == b.anchor.bits);
    CHECK(a.anchor.a == b.anchor.a);
    CHECK(a.encoder->fingerprint() == b.encoder->fingerprint());
    CHECK(a.matrix->fingerprint() == b.matrix->fingerprint());
}

TEST_CASE("dropping L_o zeroes its column and removes it from the total") {
    Corpus corpus = tiny_corpus();
    StubLlmClient client;
    auto art = ablate(corpus, tiny_config(), Ablation::drop_lo, client);
    CHECK(art.report.ablation == to_string(Ablation::drop_lo));
    for (const auto& r : art.report.records) {
        CHECK(r.l_o == 0.0);
        CHECK(std::fabs(r.l_total - (r.l_ce + r.l_con + r.l_w)) <= 1e-9);
    }
}

TEST_CASE("dropping L_con zeroes its column") {
    Corpus corpus = tiny_corpus();
    StubLlmClient client;
    auto art = ablate(corpus, tiny_config(), Ablation::drop_lcon, client);
    for (const auto& r : art.report.records) CHECK(r.l_con == 0.0);
}

TEST_CASE("freeze_alpha leaves the encoder fingerprint unchanged") {
    Corpus corpus = tiny_corpus();
    TrainingConfig cfg = tiny_config();
    StubLlmClient client;
    Encoder fresh(cfg.encoder);
    auto art = ablate(corpus, cfg, Ablation::freeze_alpha, client);
    CHECK(art.encoder->fingerprint() == fresh.fingerprint());

    auto full = train(corpus, cfg, client);
    CHECK(full.encoder->fingerprint() != fresh.fingerprint());
}

TEST_CASE("ablate requires an actual component") {
    Corpus corpus = tiny_corpus();
    StubLlmClient client;
    CHECK_THROWS_AS(ablate(corpus, tiny_config(), Ablation::none, client), ContractError);
}

TEST_CASE("ablation names round-trip") {
    for (Ablation a : {Ablation::drop_lcon, Ablation::drop_lo, Ablation::drop_condensation,
                       Ablation::freeze_alpha, Ablation::drop_qp})
        CHECK(ablation_from_string(to_string(a)) == a);
    CHECK_THROWS_AS(ablation_from_string("bogus"), ContractError);
}

TEST_CASE("cosine decay schedule hits its endpoints and never rises") {
    const double start = 5e-5, floor = 1e-7;
    const long total = 40;
    CHECK(cosine_decay_lr(start, floor, 0, total) == doctest::Approx(start));
    CHECK(cosine_decay_lr(start, floor, total, total) == doctest::Approx(floor));
    double prev = start + 1;
    for (long s = 0; s <= total; ++s) {
        double lr = cosine_decay_lr(start, floor, s, total);
        CHECK(lr <= prev + 1e-15);
        CHECK(lr >= floor - 1e-15);
        prev = lr;
    }
}

TEST_CASE("AdamW with zero gradients and no weight decay proposes no update") {
    AdamW opt;
    std::vector<Eigen::MatrixXd> params = {Eigen::MatrixXd::Constant(2, 2, 1.5)};
    std::vector<Eigen::MatrixXd> grads = {Eigen::MatrixXd::Zero(2, 2)};
    auto dir = opt.step(grads, params);
    CHECK(dir[0].norm() == doctest::Approx(0.0));
}

TEST_CASE("AdamW decoupled weight decay pulls parameters toward zero") {
    AdamW opt(0.9, 0.999, 1e-8, 0.1);
    std::vector<Eigen::MatrixXd> params = {Eigen::MatrixXd::Constant(1, 1, 2.0)};
    std::vector<Eigen::MatrixXd> grads = {Eigen::MatrixXd::Zero(1, 1)};
    auto dir = opt.step(grads, params);
    CHECK(dir[0](0, 0) > 0.0); // params -= lr * dir moves toward zero
}
