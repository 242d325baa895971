#include "mizero/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mizero {

using nlohmann::json;

std::string to_string(Label l) {
    return l == Label::protected_style ? "protected" : "unprotected";
}

std::string to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        default: return "test";
    }
}

Label label_from_string(const std::string& s) {
    if (s == "protected") return Label::protected_style;
    if (s == "unprotected") return Label::unprotected_style;
    throw ParseError("unknown label: " + s);
}

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "val") return Split::val;
    if (s == "test") return Split::test;
    throw ParseError("unknown split: " + s);
}

std::size_t whitespace_token_count(const std::string& text) {
    std::istringstream in(text);
    std::string tok;
    std::size_t n = 0;
    while (in >> tok) ++n;
    return n;
}

namespace {

std::string trimmed(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

Corpus::Corpus(std::vector<StyleSample> samples, std::string style_id)
    : samples_(std::move(samples)), style_id_(std::move(style_id)) {
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        auto [it, fresh] = index_.emplace(samples_[i].id, i);
        if (!fresh) throw IntegrityError("duplicate sample id: " + samples_[i].id);
    }
    validate();
}

void Corpus::validate() const {
    std::size_t train_p = 0, train_n = 0;
    for (const auto& s : samples_) {
        if (trimmed(s.text).empty())
            throw ValidationError("sample " + s.id + " has empty text");
        if (s.split == Split::train) {
            (s.label == Label::protected_style ? train_p : train_n)++;
        }
    }
    if (train_p != train_n)
        throw ValidationError("train split unbalanced: " + std::to_string(train_p) +
                              " protected vs " + std::to_string(train_n) + " unprotected");
}

Corpus Corpus::load(const std::string& path, const std::string& style_id) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open corpus file: " + path);
    std::vector<StyleSample> samples;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trimmed(line).empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
        try {
            StyleSample s;
            s.id = rec.at("id").get<std::string>();
            s.text = rec.at("text").get<std::string>();
            s.label = label_from_string(rec.at("label").get<std::string>());
            s.source_model = rec.value("source_model", "");
            s.split = split_from_string(rec.at("split").get<std::string>());
            samples.push_back(std::move(s));
        } catch (const json::exception& e) {
            throw ParseError("line " + std::to_string(lineno) + ": missing field: " + e.what());
        }
    }
    if (samples.empty()) throw ParseError("corpus file has no records: " + path);
    return Corpus(std::move(samples), style_id);
}

void Corpus::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw MizeroError("cannot write corpus file: " + path);
    for (const auto& s : samples_) {
        json rec = {{"id", s.id},
                    {"text", s.text},
                    {"label", to_string(s.label)},
                    {"source_model", s.source_model},
                    {"split", to_string(s.split)}};
        out << rec.dump() << "\n";
    }
}

const StyleSample& Corpus::by_id(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw IntegrityError("unknown sample id: " + id);
    return samples_[it->second];
}

std::vector<const StyleSample*> Corpus::subset(Split split, Label label) const {
    std::vector<const StyleSample*> out;
    for (const auto& s : samples_)
        if (s.split == split && s.label == label) out.push_back(&s);
    return out;
}

std::vector<const StyleSample*> Corpus::subset(Split split) const {
    std::vector<const StyleSample*> out;
    for (const auto& s : samples_)
        if (s.split == split) out.push_back(&s);
    return out;
}

CorpusManifest Corpus::manifest() const {
    CorpusManifest m;
    m.style_id = style_id_;
    std::map<Label, std::size_t> tok_sum, tok_cnt;
    std::map<std::string, std::size_t> neg_src;
    std::size_t neg_total = 0;
    for (const auto& s : samples_) {
        m.counts[{s.split, s.label}]++;
        tok_sum[s.label] += whitespace_token_count(s.text);
        tok_cnt[s.label]++;
        if (s.label == Label::unprotected_style) {
            neg_src[s.source_model.empty() ? "(unknown)" : s.source_model]++;
            ++neg_total;
        }
    }
    for (auto& [label, cnt] : tok_cnt)
        m.avg_len[label] = static_cast<double>(tok_sum[label]) / static_cast<double>(cnt);
    for (auto& [src, cnt] : neg_src)
        m.neg_mixture[src] = static_cast<double>(cnt) / static_cast<double>(neg_total);
    m.num = m.counts.count({Split::train, Label::protected_style})
                ? m.counts.at({Split::train, Label::protected_style})
                : 0;
    return m;
}

std::pair<std::vector<StyleSample>, std::vector<StyleSample>>
sample_episode(const Corpus& corpus, std::size_t num, std::uint64_t seed) {
    auto pick = [&](Label label, std::uint64_t stream) {
        auto pool = corpus.subset(Split::train, label);
        if (pool.size() < num)
            throw CapacityError("episode needs " + std::to_string(num) + " " + to_string(label) +
                                " train samples, corpus has " + std::to_string(pool.size()));
        std::mt19937_64 rng(seed ^ (stream * 0x9e3779b97f4a7c15ULL));
        std::shuffle(pool.begin(), pool.end(), rng);
        std::vector<StyleSample> out;
        out.reserve(num);
        for (std::size_t i = 0; i < num; ++i) out.push_back(*pool[i]);
        std::sort(out.begin(), out.end(),
                  [](const StyleSample& a, const StyleSample& b) { return a.id < b.id; });
        return out;
    };
    return {pick(Label::protected_style, 1), pick(Label::unprotected_style, 2)};
}

} // namespace mizero
