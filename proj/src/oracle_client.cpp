#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "curator/oracle_client.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <json.hpp>
#include <spdlog/spdlog.h>

namespace curator::oracle {

using Json = nlohmann::json;

std::string chat_request_body(const HttpClientConfig& cfg, const std::string& prompt) {
    Json body{{"model", cfg.model},
              {"messages", Json::array({Json{{"role", "user"}, {"content", prompt}}})},
              {"temperature", cfg.temperature},
              {"max_tokens", cfg.max_tokens}};
    return body.dump();
}

std::string chat_response_text(const std::string& body) {
    Json j;
    try {
        j = Json::parse(body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const std::exception& e) {
        throw PermanentError(std::string("malformed completion response: ") + e.what());
    }
}

HttpCompletionClient::HttpCompletionClient(HttpClientConfig cfg) : cfg_(std::move(cfg)) {
    const auto scheme_end = cfg_.endpoint.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint must be an http(s) URL: " + cfg_.endpoint);
    const auto path_start = cfg_.endpoint.find('/', scheme_end + 3);
    origin_ = cfg_.endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : cfg_.endpoint.substr(path_start);
    if (const char* token = std::getenv(cfg_.token_env.c_str())) token_ = token;
}

std::string HttpCompletionClient::complete(const std::string& prompt) {
    httplib::Client cli(origin_);
    const auto secs = static_cast<time_t>(cfg_.timeout.count());
    cli.set_connection_timeout(secs, 0);
    cli.set_read_timeout(secs, 0);
    cli.set_write_timeout(secs, 0);
    httplib::Headers headers;
    if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);

    auto res = cli.Post(path_, headers, chat_request_body(cfg_, prompt), "application/json");
    if (!res) throw TransientError("request to " + cfg_.endpoint + " failed: " + httplib::to_string(res.error()));
    const int status = res->status;
    if (status == 401 || status == 403) throw AuthError("oracle rejected credentials (HTTP " + std::to_string(status) + ")");
    if (status == 408 || status == 429 || status >= 500) throw TransientError("oracle returned HTTP " + std::to_string(status));
    if (status < 200 || status >= 300) throw PermanentError("oracle returned HTTP " + std::to_string(status) + ": " + res->body);
    return chat_response_text(res->body);
}

FileMockClient::FileMockClient(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mock oracle file " + path.string());
    Json j = Json::parse(in);
    name_ = j.value("name", std::string("mock"));
    fallback_ = j.value("default", std::string{});
    if (j.contains("rules")) {
        for (const auto& r : j["rules"]) rules_.push_back({r.at("contains").get<std::string>(), r.at("response").get<std::string>()});
    }
}

std::string FileMockClient::complete(const std::string& prompt) {
    for (const auto& r : rules_) {
        if (prompt.find(r.contains) != std::string::npos) return r.response;
    }
    return fallback_;
}

Sleeper real_sleeper() {
    return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

OracleResponse query_oracle(const std::string& prompt, CompletionClient& client, const RetryPolicy& policy,
                            const Sleeper& sleep) {
    auto backoff = policy.initial_backoff;
    for (int attempt = 0;; ++attempt) {
        try {
            return OracleResponse{client.complete(prompt), attempt};
        } catch (const TransientError& e) {
            if (attempt >= policy.max_retries) {
                spdlog::error("oracle {}: giving up after {} retries: {}", client.name(), attempt, e.what());
                throw;
            }
            spdlog::warn("oracle {}: transient failure ({}), retry {} in {} ms", client.name(), e.what(), attempt + 1,
                         backoff.count());
            if (sleep) sleep(backoff);
            backoff = std::min(policy.max_backoff, std::chrono::milliseconds(static_cast<long long>(
                                                       static_cast<double>(backoff.count()) * policy.multiplier)));
        }
    }
}

}  // namespace curator::oracle
