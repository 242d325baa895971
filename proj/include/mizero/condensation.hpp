#pragma once

#include <array>
#include <optional>
#include <string>

#include "mizero/common.hpp"
#include "mizero/corpus.hpp"

namespace mizero {

enum class PromptKind { q_p, q_n };

std::string to_string(PromptKind k);

inline constexpr std::array<const char*, 5> kAspectTags = {"VWC", "SSGF", "RDCS", "TS", "RF"};

// 5-aspect style summary for one sample.
struct CondensedList {
    std::string sample_id;
    std::array<std::string, 5> aspects; // VWC, SSGF, RDCS, TS, RF in order
    std::string generator_id;
    std::string raw_response;

    std::string joined() const; // single text fed to the encoder
};

// q_p embeds the sample plus its optimal prior-knowledge partner as a
// reference instance; q_n embeds the sample alone.
std::string build_prompt(const StyleSample& sample, const StyleSample* pair_partner,
                         PromptKind kind);

// Parses a model response into the 5 aspects; nullopt when malformed.
std::optional<std::array<std::string, 5>> parse_condensed_response(const std::string& response);

class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual std::string complete(const std::string& prompt) = 0;
    virtual std::string id() const = 0;
};

// Deterministic offline condenser: derives the five aspects from lexical
// statistics of the sample text embedded in the prompt.
class StubLlmClient : public LlmClient {
public:
    std::string complete(const std::string& prompt) override;
    std::string id() const override { return "stub"; }
};

struct HttpLlmConfig {
    std::string base_url = "https://api.openai.com";
    std::string path = "/v1/chat/completions";
    std::string model = "gpt-3.5-turbo";
    std::string api_key_env = "MIZERO_LLM_API_KEY";
    int timeout_sec = 60;
    int max_retries = 3;
    int backoff_ms = 500;
};

// OpenAI-compatible chat-completions client.
class HttpLlmClient : public LlmClient {
public:
    explicit HttpLlmClient(HttpLlmConfig config);
    std::string complete(const std::string& prompt) override;
    std::string id() const override { return config_.model; }

private:
    HttpLlmConfig config_;
    std::string api_key_;
};

// Incremented on every outbound HTTP attempt; the offline guarantee test
// asserts it stays at zero under --llm-stub.
std::size_t llm_network_attempts();
void reset_llm_network_attempts();

namespace detail {
void note_llm_network_attempt();
}

// One file per (prompt hash, generator id) holding prompt, raw response and
// the parsed list.
class CondenseCache {
public:
    explicit CondenseCache(std::string dir);
    std::optional<CondensedList> lookup(const std::string& prompt,
                                        const std::string& generator_id) const;
    void store(const std::string& prompt, const CondensedList& list) const;
    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }

private:
    std::string key_path(const std::string& prompt, const std::string& generator_id) const;
    std::string dir_;
    mutable std::size_t hits_ = 0;
    mutable std::size_t misses_ = 0;
};

// Calls the client (through the cache when given), parses, retries once with
// a format reminder on malformed output.
CondensedList condense(const std::string& prompt, const std::string& sample_id, LlmClient& client,
                       CondenseCache* cache = nullptr, int max_retries = 1);

// Direct offline surrogate over a raw sample text.
CondensedList stub_condense(const std::string& sample_text);

// Shared with the stub client: aspect synthesis from text statistics.
std::array<std::string, 5> stub_aspects(const std::string& sample_text,
                                        const std::string& reference_text);

} // namespace mizero
