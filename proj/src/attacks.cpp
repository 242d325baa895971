#include "mizero/attacks.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <sstream>

namespace mizero {

std::string to_string(AttackKind k) {
    switch (k) {
        case AttackKind::upper_lower: return "upper_lower";
        case AttackKind::misspelling: return "misspelling";
        case AttackKind::number: return "number";
        case AttackKind::add_paragraph: return "add_paragraph";
        default: return "rewrite";
    }
}

AttackKind attack_kind_from_string(const std::string& s) {
    if (s == "upper_lower") return AttackKind::upper_lower;
    if (s == "misspelling") return AttackKind::misspelling;
    if (s == "number") return AttackKind::number;
    if (s == "add_paragraph") return AttackKind::add_paragraph;
    if (s == "rewrite") return AttackKind::rewrite;
    throw ContractError("unknown attack kind: " + s);
}

const std::map<std::string, std::string>& misspelling_lexicon() {
    static const std::map<std::string, std::string> lex = {
        {"definitely", "definately"}, {"separate", "seperate"},   {"receive", "recieve"},
        {"believe", "beleive"},       {"occurred", "occured"},    {"until", "untill"},
        {"which", "wich"},            {"weird", "wierd"},         {"really", "realy"},
        {"beautiful", "beatiful"},    {"friend", "freind"},       {"because", "becuase"},
        {"tomorrow", "tommorow"},     {"beginning", "begining"},  {"government", "goverment"},
        {"argument", "arguement"},    {"environment", "enviroment"},
        {"necessary", "neccessary"},  {"immediately", "immediatly"},
        {"truly", "truely"},          {"grateful", "greatful"},   {"their", "thier"},
        {"coming", "comming"},        {"finally", "finaly"},      {"surprise", "suprise"},
        {"different", "diffrent"},    {"probably", "probaly"},    {"interesting", "intresting"},
        {"little", "littel"},         {"together", "togather"},   {"something", "somthing"},
        {"always", "alwais"},         {"thought", "thougt"},      {"honestly", "honestley"},
        {"basically", "basicly"},     {"literally", "literaly"}};
    return lex;
}

const std::map<std::string, std::string>& rewrite_thesaurus() {
    static const std::map<std::string, std::string> lex = {
        {"thou", "you"},        {"thee", "you"},         {"thy", "your"},
        {"hath", "has"},        {"doth", "does"},        {"quoth", "said"},
        {"wherefore", "why"},   {"perchance", "maybe"},  {"alas", "sadly"},
        {"yonder", "distant"},  {"beauteous", "pretty"}, {"mournful", "sad"},
        {"tempest", "storm"},   {"verily", "truly"},     {"betwixt", "between"},
        {"hither", "here"},     {"woe", "misery"},       {"grief", "sadness"},
        {"sorrow", "sadness"},  {"lament", "cry"},       {"gilded", "golden"},
        {"twilight", "dusk"},   {"solemn", "serious"},   {"ere", "before"},
        {"mellifluous", "smooth"}, {"bleak", "empty"},   {"weep", "cry"},
        {"mourn", "grieve"},    {"forlorn", "lonely"},   {"dolorous", "painful"},
        {"funereal", "grave"},  {"ashen", "pale"},       {"spectre", "ghost"},
        {"wraith", "phantom"},  {"dreary", "dull"},      {"desolate", "barren"},
        {"thine", "yours"},     {"whilst", "while"},     {"amidst", "among"},
        {"forsooth", "indeed"}, {"nightingale", "bird"}, {"zephyr", "breeze"},
        {"alabaster", "white"}, {"dirge", "hymn"},       {"shroud", "cloth"},
        {"sepulchre", "tomb"},  {"moonlit", "bright"},   {"sonnet", "poem"},
        {"minstrel", "singer"}, {"lyre", "harp"},
        {"awesome", "good"},    {"totally", "completely"}, {"basically", "mostly"},
        {"literally", "actually"}, {"kinda", "somewhat"}, {"chill", "relax"},
        {"random", "arbitrary"}, {"crazy", "wild"},      {"super", "very"},
        {"weird", "odd"},       {"boring", "dull"},      {"laptop", "computer"},
        {"app", "program"},     {"movie", "film"},       {"pizza", "food"},
        {"coffee", "drink"},    {"weekend", "break"},    {"online", "connected"},
        {"honestly", "frankly"}, {"stuff", "things"},    {"fun", "enjoyment"},
        {"game", "match"},      {"email", "message"},    {"phone", "device"},
        {"video", "clip"},      {"epic", "big"},         {"gross", "nasty"},
        {"trash", "garbage"},   {"lame", "weak"},        {"update", "change"},
        {"playlist", "songs"},  {"podcast", "show"},     {"selfie", "photo"},
        {"scrolling", "browsing"}, {"streaming", "watching"}};
    return lex;
}

namespace {

struct Segment {
    std::string text;
    bool is_token = false;
};

std::vector<Segment> segment(const std::string& text) {
    std::vector<Segment> out;
    std::string cur;
    bool cur_token = false;
    for (char c : text) {
        bool ws = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!cur.empty() && cur_token == !ws) {
            cur.push_back(c);
            continue;
        }
        if (!cur.empty()) out.push_back({cur, cur_token});
        cur = std::string(1, c);
        cur_token = !ws;
    }
    if (!cur.empty()) out.push_back({cur, cur_token});
    return out;
}

std::string core_lower(const std::string& tok, std::size_t& b, std::size_t& e) {
    b = 0;
    e = tok.size();
    while (b < e && !std::isalnum(static_cast<unsigned char>(tok[b]))) ++b;
    while (e > b && !std::isalnum(static_cast<unsigned char>(tok[e - 1]))) --e;
    std::string core = tok.substr(b, e - b);
    for (char& ch : core) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return core;
}

std::string match_case(const std::string& replacement, const std::string& original) {
    if (!original.empty() && std::isupper(static_cast<unsigned char>(original[0]))) {
        std::string r = replacement;
        if (!r.empty()) r[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(r[0])));
        return r;
    }
    return replacement;
}

std::string apply_upper_lower(const std::string& text, const AttackConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    std::string out = text;
    if (cfg.budget_mode) {
        std::vector<std::size_t> alpha;
        for (std::size_t i = 0; i < out.size(); ++i)
            if (std::isalpha(static_cast<unsigned char>(out[i]))) alpha.push_back(i);
        std::shuffle(alpha.begin(), alpha.end(), rng);
        std::size_t budget = static_cast<std::size_t>(cfg.rate * static_cast<double>(alpha.size()));
        for (std::size_t k = 0; k < budget; ++k) {
            char& c = out[alpha[k]];
            c = std::isupper(static_cast<unsigned char>(c))
                    ? static_cast<char>(std::tolower(static_cast<unsigned char>(c)))
                    : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
        return out;
    }
    std::bernoulli_distribution flip(cfg.rate);
    for (char& c : out) {
        if (!std::isalpha(static_cast<unsigned char>(c))) continue;
        if (!flip(rng)) continue;
        c = std::isupper(static_cast<unsigned char>(c))
                ? static_cast<char>(std::tolower(static_cast<unsigned char>(c)))
                : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return out;
}

std::string apply_misspelling(const std::string& text, const AttackConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    auto segs = segment(text);
    const auto& lex = misspelling_lexicon();

    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (!segs[i].is_token) continue;
        std::size_t b, e;
        if (lex.count(core_lower(segs[i].text, b, e))) eligible.push_back(i);
    }
    std::vector<bool> hit(segs.size(), false);
    if (cfg.budget_mode) {
        std::shuffle(eligible.begin(), eligible.end(), rng);
        std::size_t budget =
            static_cast<std::size_t>(cfg.rate * static_cast<double>(eligible.size()));
        for (std::size_t k = 0; k < budget; ++k) hit[eligible[k]] = true;
    } else {
        std::bernoulli_distribution draw(cfg.rate);
        for (std::size_t i : eligible) hit[i] = draw(rng);
    }

    std::string out;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (!hit[i]) {
            out += segs[i].text;
            continue;
        }
        std::size_t b, e;
        std::string key = core_lower(segs[i].text, b, e);
        std::string repl = match_case(lex.at(key), segs[i].text.substr(b, e - b));
        out += segs[i].text.substr(0, b) + repl + segs[i].text.substr(e);
    }
    return out;
}

std::string apply_number(const std::string& text, const AttackConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    std::bernoulli_distribution draw(cfg.rate);
    std::uniform_int_distribution<int> digits(1, 999);
    auto segs = segment(text);
    std::string out;
    for (const auto& s : segs) {
        out += s.text;
        if (s.is_token && draw(rng)) out += " " + std::to_string(digits(rng));
    }
    return out;
}

std::string apply_add_paragraph(const std::string& text, const AttackConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    std::bernoulli_distribution draw(cfg.rate);
    std::string out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        out.push_back(text[i]);
        bool boundary = (text[i] == '.' || text[i] == '!' || text[i] == '?') &&
                        i + 1 < text.size() &&
                        std::isspace(static_cast<unsigned char>(text[i + 1]));
        if (boundary && draw(rng)) out += "\n\n";
    }
    return out;
}

const char* kRewriteSample = "<<SAMPLE>>";
const char* kRewriteEnd = "<<END>>";

} // namespace

std::string StubRewriteClient::complete(const std::string& prompt) {
    std::string text = prompt;
    auto b = prompt.find(kRewriteSample);
    if (b != std::string::npos) {
        b += std::string(kRewriteSample).size();
        auto e = prompt.find(kRewriteEnd, b);
        if (e != std::string::npos) text = prompt.substr(b, e - b);
    }
    std::mt19937_64 rng(seed_ ^ fnv1a(text.data(), text.size()));
    std::bernoulli_distribution draw(rate_);
    auto segs = segment(text);
    const auto& lex = rewrite_thesaurus();
    std::string out;
    for (const auto& s : segs) {
        if (!s.is_token) {
            out += s.text;
            continue;
        }
        std::size_t cb, ce;
        std::string key = core_lower(s.text, cb, ce);
        auto it = lex.find(key);
        if (it != lex.end() && draw(rng)) {
            out += s.text.substr(0, cb) + match_case(it->second, s.text.substr(cb, ce - cb)) +
                   s.text.substr(ce);
        } else {
            out += s.text;
        }
    }
    // light punctuation normalization: a paraphrase tends to flatten
    // semicolon-linked clauses into plain sentences
    std::bernoulli_distribution norm(rate_ * 0.5);
    for (char& c : out)
        if (c == ';' && norm(rng)) c = '.';
    return out;
}

std::string perturb(const std::string& text, const AttackConfig& config) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        throw ContractError("perturb: empty text");
    if (config.rate < 0.0 || config.rate > 1.0)
        throw ContractError("perturb: rate must lie in [0, 1]");
    switch (config.kind) {
        case AttackKind::upper_lower: return apply_upper_lower(text, config);
        case AttackKind::misspelling: return apply_misspelling(text, config);
        case AttackKind::number: return apply_number(text, config);
        case AttackKind::add_paragraph: return apply_add_paragraph(text, config);
        case AttackKind::rewrite: {
            if (config.rewrite_client == nullptr)
                throw ContractError("perturb: rewrite requires a client");
            std::string prompt = std::string("Rewrite the text between the markers, keeping its "
                                             "style and meaning.\n") +
                                 kRewriteSample + "\n" + text + "\n" + kRewriteEnd + "\n";
            return config.rewrite_client->complete(prompt);
        }
    }
    throw ContractError("perturb: unknown attack kind");
}

AttackEvaluation attack_evaluation(const std::vector<const StyleSample*>& test_samples,
                                   const std::vector<AttackKind>& kinds, const Verifier& verifier,
                                   LlmClient& condense_client, double rate, std::uint64_t seed,
                                   LlmClient* rewrite_client, CondenseCache* cache) {
    AttackEvaluation out;
    auto clean = verifier.batch_verify(test_samples, condense_client, cache);
    out.clean = metrics_from_confusion(clean.confusion);

    for (AttackKind kind : kinds) {
        std::vector<StyleSample> attacked;
        attacked.reserve(test_samples.size());
        for (const auto* s : test_samples) {
            AttackConfig cfg;
            cfg.kind = kind;
            cfg.rate = rate;
            cfg.seed = seed ^ fnv1a(s->id.data(), s->id.size());
            cfg.rewrite_client = rewrite_client;
            StyleSample copy = *s;
            copy.text = perturb(s->text, cfg);
            attacked.push_back(std::move(copy));
        }
        std::vector<const StyleSample*> ptrs;
        for (const auto& s : attacked) ptrs.push_back(&s);
        auto bv = verifier.batch_verify(ptrs, condense_client, cache);

        AttackOutcome oc;
        oc.kind = kind;
        oc.metrics = metrics_from_confusion(bv.confusion);
        oc.metrics.metadata = {{"attack", to_string(kind)}, {"rate", rate}, {"seed", seed}};
        oc.f1_delta = oc.metrics.f1 - out.clean.f1;
        oc.tpr_delta = oc.metrics.tpr.value_or(0) - out.clean.tpr.value_or(0);
        oc.fpr_delta = oc.metrics.fpr.value_or(0) - out.clean.fpr.value_or(0);
        out.outcomes.push_back(std::move(oc));
    }
    return out;
}

} // namespace mizero
