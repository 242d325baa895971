#include "mizero/condensation.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

namespace mizero {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::size_t g_network_attempts = 0;

const char* kSampleMarker = "<<SAMPLE>>";
const char* kReferenceMarker = "<<REFERENCE>>";
const char* kEndMarker = "<<END>>";

std::string aspect_instructions() {
    return "Summarize exactly five aspects of the sample's writing style, one line each,\n"
           "each line starting with its tag:\n"
           "VWC: vocabulary and word choice (register, characteristic or unusual words)\n"
           "SSGF: syntactic structure and grammatical features (sentence construction, clause use)\n"
           "RDCS: rhetorical devices and stylistic choices (figures of speech, punctuation habits)\n"
           "TS: tone and sentiment (the emotional coloring of the writing)\n"
           "RF: rhythm and flow (cadence and pacing of the sentences)\n";
}

std::vector<std::string> word_tokens(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!cur.empty()) out.push_back(cur), cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string strip_punct(const std::string& tok) {
    std::size_t b = 0, e = tok.size();
    while (b < e && !std::isalnum(static_cast<unsigned char>(tok[b]))) ++b;
    while (e > b && !std::isalnum(static_cast<unsigned char>(tok[e - 1]))) --e;
    return tok.substr(b, e - b);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool all_alpha(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isalpha(static_cast<unsigned char>(c)); });
}

std::vector<std::string> sentences(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        cur.push_back(ch);
        if (ch == '.' || ch == '!' || ch == '?') {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (cur.find_first_not_of(" \t\r\n") != std::string::npos) out.push_back(cur);
    return out;
}

int vowel_groups(const std::string& word) {
    static const std::string vowels = "aeiouy";
    int groups = 0;
    bool in = false;
    for (char c : word) {
        bool v = vowels.find(static_cast<char>(std::tolower(static_cast<unsigned char>(c)))) !=
                 std::string::npos;
        if (v && !in) ++groups;
        in = v;
    }
    return std::max(groups, 1);
}

const std::set<std::string>& positive_lexicon() {
    static const std::set<std::string> lex = {
        "love",  "sweet",   "joy",      "bright", "gentle", "fair",    "delight", "happy",
        "merry", "radiant", "splendid", "tender", "bliss",  "glorious", "cheer",  "warm",
        "cool",  "awesome", "great",    "fun",    "nice",   "chill",    "epic",   "win"};
    return lex;
}

const std::set<std::string>& negative_lexicon() {
    static const std::set<std::string> lex = {
        "death",  "sorrow", "grief", "dark",  "cruel",  "woe",     "bitter",   "pain",
        "weep",   "mourn",  "bleak", "dread", "sad",    "angry",   "hate",     "awful",
        "gross",  "trash",  "fail",  "worst", "boring", "lame",    "lament",   "mournful",
        "forlorn", "dreary", "desolate", "dolorous", "funereal", "shroud",  "dirge"};
    return lex;
}

std::string bucket3(double v, double lo, double hi, const char* a, const char* b, const char* c) {
    if (v < lo) return a;
    if (v < hi) return b;
    return c;
}

} // namespace

std::string to_string(PromptKind k) { return k == PromptKind::q_p ? "q_p" : "q_n"; }

std::string CondensedList::joined() const {
    std::string out;
    for (std::size_t i = 0; i < aspects.size(); ++i) {
        out += kAspectTags[i];
        out += ": ";
        out += aspects[i];
        out += "\n";
    }
    return out;
}

std::string build_prompt(const StyleSample& sample, const StyleSample* pair_partner,
                         PromptKind kind) {
    if (kind == PromptKind::q_p && pair_partner == nullptr)
        throw ContractError("build_prompt: q_p requires a pair partner");
    std::string p = "You are a literary style analyst.\n";
    p += aspect_instructions();
    if (kind == PromptKind::q_p) {
        p += "The reference instance below is written in the same style as the sample.\n"
             "Use it to sharpen your description of the sample's style; describe the sample.\n";
        p += kReferenceMarker;
        p += "\n";
        p += pair_partner->text;
        p += "\n";
    }
    p += kSampleMarker;
    p += "\n";
    p += sample.text;
    p += "\n";
    p += kEndMarker;
    p += "\nRespond with exactly five lines tagged VWC:, SSGF:, RDCS:, TS:, RF: in that order.\n";
    return p;
}

std::optional<std::array<std::string, 5>> parse_condensed_response(const std::string& response) {
    std::array<std::string, 5> aspects;
    std::istringstream in(response);
    std::string line;
    int current = -1;
    while (std::getline(in, line)) {
        std::string t = line;
        std::size_t b = t.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        t = t.substr(b);
        bool tagged = false;
        for (int i = 0; i < 5; ++i) {
            std::string tag = std::string(kAspectTags[static_cast<std::size_t>(i)]) + ":";
            if (t.rfind(tag, 0) == 0) {
                if (i != current + 1) return std::nullopt; // wrong order or repeat
                current = i;
                std::string body = t.substr(tag.size());
                std::size_t bb = body.find_first_not_of(" \t");
                aspects[static_cast<std::size_t>(i)] =
                    bb == std::string::npos ? "" : body.substr(bb);
                tagged = true;
                break;
            }
        }
        if (!tagged && current >= 0) {
            // continuation of the current aspect
            aspects[static_cast<std::size_t>(current)] += " " + t;
        }
    }
    if (current != 4) return std::nullopt;
    for (const auto& a : aspects)
        if (a.empty()) return std::nullopt;
    return aspects;
}

std::array<std::string, 5> stub_aspects(const std::string& sample_text,
                                        const std::string& reference_text) {
    if (sample_text.find_first_not_of(" \t\r\n") == std::string::npos)
        throw ContractError("stub_condense: empty text");

    auto raw_toks = word_tokens(sample_text);
    std::vector<std::string> words;
    std::size_t upper_letters = 0, letters = 0;
    for (const auto& rt : raw_toks) {
        for (char c : rt) {
            if (std::isalpha(static_cast<unsigned char>(c))) {
                ++letters;
                if (std::isupper(static_cast<unsigned char>(c))) ++upper_letters;
            }
        }
        std::string w = lower(strip_punct(rt));
        if (all_alpha(w)) words.push_back(w);
    }
    double upper_ratio = letters ? static_cast<double>(upper_letters) / letters : 0.0;

    std::set<std::string> ref_words;
    if (!reference_text.empty())
        for (const auto& rt : word_tokens(reference_text)) {
            std::string w = lower(strip_punct(rt));
            if (all_alpha(w)) ref_words.insert(w);
        }

    // VWC: characteristic words, shared-with-reference first, then long ones
    std::map<std::string, int> score;
    for (const auto& w : words) {
        if (w.size() < 4) continue;
        int s = 0;
        if (ref_words.count(w)) s += 2;
        if (w.size() >= 7) s += 1;
        auto it = score.find(w);
        if (it == score.end() || it->second < s) score[w] = s;
    }
    std::vector<std::pair<std::string, int>> ranked(score.begin(), score.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::string vwc;
    for (std::size_t i = 0; i < ranked.size() && i < 4; ++i)
        vwc += (vwc.empty() ? "" : " ") + ranked[i].first;
    if (vwc.empty()) vwc = "unremarkable diction";
    // coarse buckets so moderate case-flip noise stays in-bucket
    vwc += std::string("; ") + bucket3(upper_ratio, 0.45, 0.9, "mostly lowercase", "mixed case",
                                       "mostly uppercase");

    // SSGF: sentence length and clause density
    auto sents = sentences(sample_text);
    double avg_len = sents.empty() ? 0.0
                                   : static_cast<double>(raw_toks.size()) /
                                         static_cast<double>(sents.size());
    std::size_t commas = static_cast<std::size_t>(
        std::count(sample_text.begin(), sample_text.end(), ','));
    double commas_per_sent =
        sents.empty() ? 0.0 : static_cast<double>(commas) / static_cast<double>(sents.size());
    std::string ssgf =
        std::string(bucket3(avg_len, 8.0, 10.5, "clipped telegraphic bursts",
                            "moderate even spans", "long winding periods")) +
        "; " +
        bucket3(commas_per_sent, 0.5, 1.8, "unsubordinated flow", "light subordination",
                "braided subordinate clauses");

    // RDCS: punctuation habit profile, naming only what is present
    auto count_of = [&](char c) {
        return std::count(sample_text.begin(), sample_text.end(), c);
    };
    std::vector<std::string> habits;
    if (long n = count_of('!'); n > 0)
        habits.push_back(n <= 2 ? "occasional exclamatory emphasis"
                                : "abundant exclamatory emphasis");
    if (count_of('?') > 0) habits.push_back("interrogative turns");
    if (count_of(';') > 0) habits.push_back("semicolon-linked cadences");
    if (count_of('"') + count_of('\'') > 0) habits.push_back("quoted speech");
    std::string rdcs;
    for (const auto& h : habits) rdcs += (rdcs.empty() ? "" : ", ") + h;
    if (rdcs.empty()) rdcs = "plain unadorned punctuation";

    // TS: lexicon polarity
    int pos = 0, neg = 0;
    for (const auto& w : words) {
        if (positive_lexicon().count(w)) ++pos;
        if (negative_lexicon().count(w)) ++neg;
    }
    double polarity = static_cast<double>(pos - neg) / static_cast<double>(pos + neg + 1);
    std::string ts = bucket3(polarity, -0.2, 0.2, "somber grieving undertow",
                             "level dispassionate register", "buoyant upbeat cheer");

    // RF: syllable-rhythm proxy
    double syl = 0.0;
    for (const auto& w : words) syl += vowel_groups(w);
    double mean_syl = words.empty() ? 1.0 : syl / static_cast<double>(words.size());
    std::string rf = bucket3(mean_syl, 1.45, 2.1, "quick staccato patter",
                             "steady walking pace", "slow rolling cadence");

    return {vwc, ssgf, rdcs, ts, rf};
}

std::string StubLlmClient::complete(const std::string& prompt) {
    auto find_section = [&](const char* begin_marker, const char* end_marker) -> std::string {
        auto b = prompt.find(begin_marker);
        if (b == std::string::npos) return "";
        b += std::string(begin_marker).size();
        auto e = prompt.find(end_marker, b);
        if (e == std::string::npos) return "";
        return prompt.substr(b, e - b);
    };
    std::string sample = find_section(kSampleMarker, kEndMarker);
    std::string reference = find_section(kReferenceMarker, kSampleMarker);
    if (sample.empty()) sample = prompt; // free-form prompt, treat whole as text
    auto aspects = stub_aspects(sample, reference);
    std::string out;
    for (std::size_t i = 0; i < aspects.size(); ++i)
        out += std::string(kAspectTags[i]) + ": " + aspects[i] + "\n";
    return out;
}

CondensedList stub_condense(const std::string& sample_text) {
    CondensedList cl;
    cl.aspects = stub_aspects(sample_text, "");
    cl.generator_id = "stub";
    for (std::size_t i = 0; i < cl.aspects.size(); ++i)
        cl.raw_response += std::string(kAspectTags[i]) + ": " + cl.aspects[i] + "\n";
    return cl;
}

std::size_t llm_network_attempts() { return g_network_attempts; }
void reset_llm_network_attempts() { g_network_attempts = 0; }

namespace detail {
void note_llm_network_attempt() { ++g_network_attempts; }
} // namespace detail

HttpLlmClient::HttpLlmClient(HttpLlmConfig config) : config_(std::move(config)) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    api_key_ = key ? key : "";
}

CondenseCache::CondenseCache(std::string dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
}

std::string CondenseCache::key_path(const std::string& prompt,
                                    const std::string& generator_id) const {
    return dir_ + "/" + fnv1a_hex(prompt) + "_" + fnv1a_hex(generator_id) + ".json";
}

std::optional<CondensedList> CondenseCache::lookup(const std::string& prompt,
                                                   const std::string& generator_id) const {
    std::ifstream in(key_path(prompt, generator_id));
    if (!in) {
        ++misses_;
        return std::nullopt;
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception&) {
        ++misses_;
        return std::nullopt;
    }
    CondensedList cl;
    cl.generator_id = j.at("generator_id").get<std::string>();
    cl.raw_response = j.at("raw_response").get<std::string>();
    auto arr = j.at("aspects");
    for (std::size_t i = 0; i < 5; ++i) cl.aspects[i] = arr[i].get<std::string>();
    ++hits_;
    return cl;
}

void CondenseCache::store(const std::string& prompt, const CondensedList& list) const {
    json j;
    j["prompt"] = prompt;
    j["generator_id"] = list.generator_id;
    j["raw_response"] = list.raw_response;
    j["aspects"] = list.aspects;
    j["created_at"] = std::chrono::duration_cast<std::chrono::seconds>(
                          std::chrono::system_clock::now().time_since_epoch())
                          .count();
    std::string path = key_path(prompt, list.generator_id);
    std::ofstream out(path + ".tmp");
    out << j.dump(2) << "\n";
    out.close();
    fs::rename(path + ".tmp", path);
}

CondensedList condense(const std::string& prompt, const std::string& sample_id, LlmClient& client,
                       CondenseCache* cache, int max_retries) {
    if (cache) {
        if (auto hit = cache->lookup(prompt, client.id())) {
            hit->sample_id = sample_id;
            return *hit;
        }
    }
    std::string ask = prompt;
    for (int attempt = 0;; ++attempt) {
        std::string response = client.complete(ask);
        if (auto parsed = parse_condensed_response(response)) {
            CondensedList cl;
            cl.sample_id = sample_id;
            cl.aspects = *parsed;
            cl.generator_id = client.id();
            cl.raw_response = response;
            if (cache) cache->store(prompt, cl);
            return cl;
        }
        if (attempt >= max_retries)
            throw ParseError("condense: unparseable response for sample " + sample_id +
                             " after " + std::to_string(attempt + 1) + " attempts");
        ask = prompt +
              "\nReminder: respond with exactly five lines tagged VWC:, SSGF:, RDCS:, TS:, RF: "
              "in that order.\n";
    }
}

} // namespace mizero
