#include <chrono>
#include <thread>

#include "mizero/condensation.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <nlohmann/json.hpp>

namespace mizero {

using nlohmann::json;

std::string HttpLlmClient::complete(const std::string& prompt) {
    json body = {{"model", config_.model},
                 {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
                 {"temperature", 0.0}};
    std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(
                std::chrono::milliseconds(config_.backoff_ms * (1 << (attempt - 1))));
        detail::note_llm_network_attempt();
        httplib::Client cli(config_.base_url);
        cli.set_connection_timeout(config_.timeout_sec);
        cli.set_read_timeout(config_.timeout_sec);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
        auto res = cli.Post(config_.path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "server status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw TransportError("llm request failed with status " +
                                 std::to_string(res->status) + ": " + res->body);
        try {
            json j = json::parse(res->body);
            return j.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            throw ParseError(std::string("llm response parse: ") + e.what());
        }
    }
    throw TransportError("llm request failed after retries: " + last_error);
}

} // namespace mizero
