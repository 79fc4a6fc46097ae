#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "curator/errors.hpp"

namespace curator::oracle {

/// Temporary failure (timeout, 429, 5xx); the request may be retried.
class TransientError : public Error {
public:
    using Error::Error;
};

/// Credentials rejected (401/403); never retried.
class AuthError : public Error {
public:
    using Error::Error;
};

/// Any other non-retryable failure.
class PermanentError : public Error {
public:
    using Error::Error;
};

/// Prompt in, completion text out. Implementations must be thread-safe.
class CompletionClient {
public:
    virtual ~CompletionClient() = default;
    virtual std::string complete(const std::string& prompt) = 0;
    virtual std::string name() const = 0;
};

struct HttpClientConfig {
    /// Full chat-completions URL, e.g. https://api.example.com/v1/chat/completions
    std::string endpoint;
    std::string model;
    /// Name of the environment variable holding the bearer token.
    std::string token_env = "ORACLE_API_KEY";
    std::chrono::seconds timeout{120};
    double temperature = 0.0;
    int max_tokens = 1024;
};

/// Chat-completions client. Sends {"model", "messages":[{"role":"user",...}],
/// "temperature", "max_tokens"} and reads choices[0].message.content.
class HttpCompletionClient final : public CompletionClient {
public:
    explicit HttpCompletionClient(HttpClientConfig cfg);
    std::string complete(const std::string& prompt) override;
    std::string name() const override { return cfg_.model; }

private:
    HttpClientConfig cfg_;
    std::string origin_;
    std::string path_;
    std::string token_;
};

/// Builds the chat-completion request body for a prompt.
std::string chat_request_body(const HttpClientConfig& cfg, const std::string& prompt);
/// Extracts choices[0].message.content from a response body.
std::string chat_response_text(const std::string& body);

/// Responses read from a JSON file:
///   {"name": "...", "default": "...", "rules": [{"contains": "...", "response": "..."}]}
/// The first rule whose `contains` occurs in the prompt wins.
class FileMockClient final : public CompletionClient {
public:
    explicit FileMockClient(const std::filesystem::path& path);
    std::string complete(const std::string& prompt) override;
    std::string name() const override { return name_; }

private:
    struct Rule {
        std::string contains;
        std::string response;
    };
    std::string name_;
    std::string fallback_;
    std::vector<Rule> rules_;
};

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{500};
    double multiplier = 2.0;
    std::chrono::milliseconds max_backoff{30000};
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

Sleeper real_sleeper();

struct OracleResponse {
    std::string text;
    int retries = 0;
};

/// Queries the client, retrying TransientError with exponential backoff up to
/// policy.max_retries. AuthError and PermanentError propagate immediately;
/// exhausting retries rethrows the last TransientError.
OracleResponse query_oracle(const std::string& prompt, CompletionClient& client, const RetryPolicy& policy = {},
                            const Sleeper& sleep = real_sleeper());

}  // namespace curator::oracle
