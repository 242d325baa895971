#include <doctest.h>

#include <cctype>
#include <random>
#include <sstream>

#include "mizero/attacks.hpp"
#include "mizero/registry.hpp"
#include "mizero/synthetic.hpp"
#include "mizero/training.hpp"
#include "mizero/verification.hpp"

using namespace mizero;

namespace {

AttackConfig cfg_for(AttackKind kind, double rate, std::uint64_t seed) {
    AttackConfig c;
    c.kind = kind;
    c.rate = rate;
    c.seed = seed;
    return c;
}

// lowercase alphabetic word stream, ignoring digits and punctuation
std::vector<std::string> alpha_tokens(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (std::isalpha(static_cast<unsigned char>(ch))) {
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

const char* kText = "The weather was definitely strange. We could not separate truth from "
                    "rumour, and I began to receive daily letters.";

} // namespace

TEST_CASE("rate zero is the identity for the deterministic attacks") {
    for (AttackKind k : {AttackKind::upper_lower, AttackKind::misspelling, AttackKind::number,
                         AttackKind::add_paragraph})
        CHECK(perturb(kText, cfg_for(k, 0.0, 1)) == kText);
}

TEST_CASE("upper_lower at rate one flips every cased character") {
    std::string out = perturb("AbC d1!", cfg_for(AttackKind::upper_lower, 1.0, 1));
    CHECK(out == "aBc D1!");
}

TEST_CASE("seeded attacks are byte-identical across replays") {
    for (AttackKind k : {AttackKind::upper_lower, AttackKind::misspelling, AttackKind::number,
                         AttackKind::add_paragraph}) {
        auto a = perturb(kText, cfg_for(k, 0.5, 77));
        auto b = perturb(kText, cfg_for(k, 0.5, 77));
        CHECK(a == b);
    }
}

TEST_CASE("misspelling substitution count matches the seeded-RNG replay") {
    AttackConfig c = cfg_for(AttackKind::misspelling, 0.3, 12345);
    std::string out = perturb(kText, c);

    // replay: eligible tokens in order of appearance, one bernoulli draw each
    const auto& lex = misspelling_lexicon();
    std::istringstream in(kText);
    std::string tok;
    std::vector<std::string> eligible;
    while (in >> tok) {
        std::string core;
        for (char ch : tok)
            if (std::isalnum(static_cast<unsigned char>(ch)))
                core += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        if (lex.count(core)) eligible.push_back(core);
    }
    REQUIRE(eligible.size() >= 3); // the text embeds several lexicon words

    std::mt19937_64 rng(c.seed);
    std::bernoulli_distribution draw(c.rate);
    int expected_hits = 0;
    for (std::size_t i = 0; i < eligible.size(); ++i)
        if (draw(rng)) ++expected_hits;

    int actual_hits = 0;
    for (const auto& [correct, wrong] : lex) {
        std::size_t pos = 0;
        while ((pos = out.find(wrong, pos)) != std::string::npos) {
            ++actual_hits;
            pos += wrong.size();
        }
    }
    CHECK(actual_hits == expected_hits);
}

TEST_CASE("misspelling only substitutes lexicon entries") {
    std::string out = perturb(kText, cfg_for(AttackKind::misspelling, 1.0, 3));
    const auto& lex = misspelling_lexicon();
    auto before = alpha_tokens(kText);
    auto after = alpha_tokens(out);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i) {
        if (before[i] == after[i]) continue;
        auto it = lex.find(before[i]);
        REQUIRE(it != lex.end());
        CHECK(after[i] == it->second);
    }
}

TEST_CASE("style-light attacks preserve the alphabetic token stream") {
    Corpus corpus = make_synthetic_corpus(6, 2, 11);
    for (const auto& s : corpus.samples()) {
        auto base = alpha_tokens(s.text);
        for (AttackKind k : {AttackKind::upper_lower, AttackKind::number,
                             AttackKind::add_paragraph}) {
            auto attacked = alpha_tokens(perturb(s.text, cfg_for(k, 0.4, 9)));
            REQUIRE(attacked == base);
        }
    }
}

TEST_CASE("number insertion only inserts digit runs") {
    std::string out = perturb(kText, cfg_for(AttackKind::number, 1.0, 4));
    CHECK(out.size() > std::string(kText).size());
    for (char ch : out)
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            continue;
    // removing digits and surrounding spaces recovers the original token stream
    CHECK(alpha_tokens(out) == alpha_tokens(kText));
}

TEST_CASE("add_paragraph inserts blank lines only at sentence boundaries") {
    std::string out = perturb(kText, cfg_for(AttackKind::add_paragraph, 1.0, 5));
    std::size_t pos = 0;
    int breaks = 0;
    while ((pos = out.find("\n\n", pos)) != std::string::npos) {
        REQUIRE(pos > 0);
        char prev = out[pos - 1];
        CHECK((prev == '.' || prev == '!' || prev == '?'));
        ++breaks;
        pos += 2;
    }
    CHECK(breaks >= 1);
}

TEST_CASE("invalid attack configurations are contract errors") {
    CHECK_THROWS_AS(perturb("", cfg_for(AttackKind::upper_lower, 0.3, 1)), ContractError);
    CHECK_THROWS_AS(perturb(kText, cfg_for(AttackKind::upper_lower, 1.5, 1)), ContractError);
    CHECK_THROWS_AS(perturb(kText, cfg_for(AttackKind::rewrite, 0.3, 1)), ContractError);
}

TEST_CASE("stub rewrite substitutes synonyms deterministically") {
    StubRewriteClient rw(1.0, 42);
    std::string text = "The forlorn nightingale sang whilst the zephyr passed.";
    std::string a = rw.complete("<<SAMPLE>>" + text + "<<END>>");
    std::string b = rw.complete("<<SAMPLE>>" + text + "<<END>>");
    CHECK(a == b);
    CHECK(a != text);
    // replaced words come from the bundled thesaurus
    CHECK(a.find("forlorn") == std::string::npos);

    AttackConfig c = cfg_for(AttackKind::rewrite, 1.0, 42);
    c.rewrite_client = &rw;
    std::string via_perturb = perturb(text, c);
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \n");
        auto e = s.find_last_not_of(" \n");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    CHECK(trim(via_perturb) == trim(a));
}

TEST_CASE("attack names round-trip") {
    for (AttackKind k : {AttackKind::upper_lower, AttackKind::misspelling, AttackKind::number,
                         AttackKind::add_paragraph, AttackKind::rewrite})
        CHECK(attack_kind_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(attack_kind_from_string("bogus"), ContractError);
}

TEST_CASE("identity attacks produce zero metric deltas") {
    Corpus corpus = make_synthetic_corpus(12, 6, 3);
    TrainingConfig cfg;
    cfg.epochs = 4;
    cfg.episodes = 2;
    cfg.num = 4;
    cfg.len = 32;
    cfg.seed = 5;
    cfg.encoder.dim = 48;
    cfg.lr_encoder_start = 5e-3;
    cfg.lr_encoder_floor = 1e-5;
    cfg.lr_matrix = 5e-3;
    StubLlmClient client;
    auto art = train(corpus, cfg, client);
    Registry reg = make_registry(art, cfg, "", "");
    Verifier verifier(reg, art.encoder, art.matrix);
    auto ev = attack_evaluation(corpus.subset(Split::test),
                                {AttackKind::upper_lower, AttackKind::misspelling,
                                 AttackKind::number, AttackKind::add_paragraph},
                                verifier, client, 0.0, 9, nullptr);
    REQUIRE(ev.outcomes.size() == 4);
    for (const auto& o : ev.outcomes) {
        CHECK(o.f1_delta == doctest::Approx(0.0));
        CHECK(o.tpr_delta == doctest::Approx(0.0));
        CHECK(o.fpr_delta == doctest::Approx(0.0));
    }
}
