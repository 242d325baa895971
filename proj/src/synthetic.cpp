#include "mizero/synthetic.hpp"

#include <random>
#include <vector>

namespace mizero {

namespace {

const std::vector<std::string>& verse_vocab() {
    static const std::vector<std::string> v = {
        "thou",     "thee",    "thy",       "hath",     "doth",      "quoth",    "wherefore",
        "perchance", "alas",   "yonder",    "beauteous", "mournful", "tempest",  "verily",
        "betwixt",  "hither",  "woe",       "grief",    "sorrow",    "lament",   "gilded",
        "twilight", "solemn",  "ere",       "mellifluous", "bleak",  "weep",     "mourn",
        "forlorn",  "dolorous", "funereal", "ashen",    "spectre",   "wraith",   "dreary",
        "desolate", "moonlit", "sonnet",    "minstrel", "lyre",      "thine",    "whilst",
        "amidst",   "forsooth", "nightingale", "zephyr", "alabaster", "dirge",   "shroud",
        "sepulchre"};
    return v;
}

const std::vector<std::string>& chat_vocab() {
    static const std::vector<std::string> v = {
        "awesome", "totally",  "basically", "literally", "kinda",     "chill",   "random",
        "crazy",   "super",    "weird",     "boring",    "laptop",    "app",     "movie",
        "pizza",   "coffee",   "weekend",   "online",    "honestly",  "stuff",   "fun",
        "game",    "email",    "phone",     "video",     "epic",      "gross",   "trash",
        "lame",    "update",   "playlist",  "podcast",   "selfie",    "scrolling",
        "streaming", "really", "little",    "together",  "something", "always",  "friend",
        "because", "okay",     "maybe",     "cool",      "nice",      "great",   "win"};
    return v;
}

const std::vector<std::string>& neutral_vocab() {
    static const std::vector<std::string> v = {
        "the",   "a",     "and",   "of",     "in",    "with",  "over",  "under", "light",
        "river", "city",  "night", "morning", "garden", "road", "window", "story", "voice",
        "hand",  "sky",   "rain",  "tree",   "door",  "dream", "stone", "field", "cloud",
        "path",  "bridge", "shadow"};
    return v;
}

std::string capitalize(std::string w) {
    if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
    return w;
}

std::string verse_text(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n_sent(3, 5);
    std::uniform_int_distribution<int> n_words(11, 18);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto pick = [&](const std::vector<std::string>& v) {
        return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
    };
    std::string text;
    int sents = n_sent(rng);
    for (int s = 0; s < sents; ++s) {
        int words = n_words(rng);
        std::string sent;
        for (int w = 0; w < words; ++w) {
            std::string word = u(rng) < 0.55 ? pick(verse_vocab()) : pick(neutral_vocab());
            if (w == 0) word = capitalize(word);
            if (!sent.empty()) sent += " ";
            sent += word;
            if (w > 0 && w + 1 < words && w % 5 == 4) sent += ",";
        }
        sent += s % 2 == 1 ? ";" : ".";
        if (!text.empty()) text += " ";
        text += sent;
    }
    return text;
}

std::string chat_text(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n_sent(4, 7);
    std::uniform_int_distribution<int> n_words(4, 9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto pick = [&](const std::vector<std::string>& v) {
        return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
    };
    std::string text;
    int sents = n_sent(rng);
    for (int s = 0; s < sents; ++s) {
        int words = n_words(rng);
        std::string sent;
        for (int w = 0; w < words; ++w) {
            std::string word = u(rng) < 0.6 ? pick(chat_vocab()) : pick(neutral_vocab());
            if (w == 0) word = capitalize(word);
            if (!sent.empty()) sent += " ";
            sent += word;
        }
        double r = u(rng);
        sent += r < 0.4 ? "!" : (r < 0.55 ? "?" : ".");
        if (!text.empty()) text += " ";
        text += sent;
    }
    return text;
}

} // namespace

Corpus make_synthetic_corpus(std::size_t train_per_class, std::size_t test_per_class,
                             std::uint64_t seed, std::size_t val_per_class) {
    std::mt19937_64 rng(seed);
    std::vector<StyleSample> samples;
    std::size_t counter = 0;
    auto emit = [&](Split split, Label label, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) {
            StyleSample s;
            char id[32];
            std::snprintf(id, sizeof(id), "s%05zu", counter++);
            s.id = id;
            s.label = label;
            s.split = split;
            if (label == Label::protected_style) {
                s.text = verse_text(rng);
                s.source_model = "synthgen-verse";
            } else {
                s.text = chat_text(rng);
                // two generator identities, mirroring a mixed negative pool
                s.source_model = i % 3 == 0 ? "synthgen-chat-b" : "synthgen-chat-a";
            }
            samples.push_back(std::move(s));
        }
    };
    emit(Split::train, Label::protected_style, train_per_class);
    emit(Split::train, Label::unprotected_style, train_per_class);
    emit(Split::val, Label::protected_style, val_per_class);
    emit(Split::val, Label::unprotected_style, val_per_class);
    emit(Split::test, Label::protected_style, test_per_class);
    emit(Split::test, Label::unprotected_style, test_per_class);
    return Corpus(std::move(samples), "verse");
}

} // namespace mizero
