#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mizero/common.hpp"

namespace mizero {

enum class Label { protected_style, unprotected_style };
enum class Split { train, val, test };

std::string to_string(Label l);
std::string to_string(Split s);
Label label_from_string(const std::string& s);
Split split_from_string(const std::string& s);

// One text with its style label and provenance. The atomic corpus unit.
struct StyleSample {
    std::string id;
    std::string text;
    Label label = Label::unprotected_style;
    std::string source_model; // may be empty
    Split split = Split::train;
};

struct CorpusManifest {
    std::string style_id;
    // per (split, label): sample count
    std::map<std::pair<Split, Label>, std::size_t> counts;
    // per label: mean whitespace-token count across all splits
    std::map<Label, double> avg_len;
    // per source_model: fraction of unprotected samples (mixture record)
    std::map<std::string, double> neg_mixture;
    std::size_t num = 0; // balanced per-class train count
};

class Corpus {
public:
    Corpus() = default;
    Corpus(std::vector<StyleSample> samples, std::string style_id);

    static Corpus load(const std::string& path, const std::string& style_id);
    void save(const std::string& path) const;

    const std::vector<StyleSample>& samples() const { return samples_; }
    const std::string& style_id() const { return style_id_; }
    const StyleSample& by_id(const std::string& id) const;

    std::vector<const StyleSample*> subset(Split split, Label label) const;
    std::vector<const StyleSample*> subset(Split split) const;

    CorpusManifest manifest() const;

private:
    void validate() const;

    std::vector<StyleSample> samples_;
    std::map<std::string, std::size_t> index_;
    std::string style_id_;
};

// Draw num protected + num unprotected train samples, deterministic under seed.
std::pair<std::vector<StyleSample>, std::vector<StyleSample>>
sample_episode(const Corpus& corpus, std::size_t num, std::uint64_t seed);

std::size_t whitespace_token_count(const std::string& text);

} // namespace mizero
