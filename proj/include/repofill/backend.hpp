#pragma once

#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <vector>

namespace repofill {

struct BackendConfig {
    std::string kind = "mock";  // mock | http
    std::string endpoint;       // http: full URL of the chat-completions route
    std::string model;
    std::string auth_env = "REPOFILL_API_TOKEN";  // name of the env var, never the value
    double timeout_seconds = 60.0;
    double temperature = 0.0;
    int max_output_tokens = 1024;
    int retries = 2;            // extra attempts after the first
    int backoff_base_ms = 250;  // doubled per retry
    int parallelism = 2;        // max in-flight requests per endpoint
    std::string canned_file;    // mock: JSON response table (see MockBackend)
};

struct GenerationRequest {
    std::string prompt;
    std::string signature_hint;  // the method header, used by mock fallbacks
    double temperature = 0.0;
    int max_tokens = 1024;
};

struct GenerationResponse {
    std::string text;
    std::size_t prompt_tokens = 0;
    std::size_t output_tokens = 0;
    double latency_seconds = 0.0;  // stdout diagnostics only, never in reports
};

/// Generation failure; `retryable` separates transient transport/server
/// conditions from permanent request errors.
class BackendError : public std::runtime_error {
public:
    BackendError(const std::string& msg, bool retryable_, int http_status_ = 0)
        : std::runtime_error(msg), retryable(retryable_), http_status(http_status_) {}
    bool retryable;
    int http_status;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string name() const = 0;
    virtual GenerationResponse generate(const GenerationRequest& req) = 0;
};

/// Deterministic test backend.
///
/// Responses come from a canned table keyed by the FNV-1a hash (hex) of the
/// prompt. Optional graded rules make output quality depend on which usage
/// markers made it into the prompt: a rule fires when its signature_token
/// occurs in the request's signature hint, and answers full_body when at
/// least min_markers_for_full of its usage_markers occur in the prompt,
/// partial_body otherwise. Unmatched prompts echo the signature with an
/// empty body.
///
/// Canned file schema:
///   { "canned": { "<prompt-hash-hex>": "response text", ... },
///     "graded": [ { "signature_token": "...", "usage_markers": ["..."],
///                   "min_markers_for_full": 1,
///                   "full_body": "...", "partial_body": "..." }, ... ] }
class MockBackend : public Backend {
public:
    struct GradedRule {
        std::string signature_token;
        std::vector<std::string> usage_markers;
        int min_markers_for_full = 1;
        std::string full_body;
        std::string partial_body;
    };

    MockBackend() = default;
    explicit MockBackend(const std::string& canned_file);

    void add_canned(const std::string& prompt, const std::string& response);
    void add_rule(GradedRule rule);

    std::string name() const override { return "mock"; }
    GenerationResponse generate(const GenerationRequest& req) override;

private:
    std::map<std::string, std::string> canned_;  // prompt hash hex -> response
    std::vector<GradedRule> rules_;
};

/// OpenAI-compatible chat-completions client with bounded retries and
/// exponential backoff. Auth comes from the env var named in the config;
/// the token value itself never reaches logs, errors, or reports.
/// Concurrent generate calls are admitted up to cfg.parallelism at a time.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(BackendConfig cfg);
    std::string name() const override { return "http"; }
    GenerationResponse generate(const GenerationRequest& req) override;

private:
    BackendConfig cfg_;
    std::string base_;  // scheme://host[:port]
    std::string path_;
    std::counting_semaphore<> slots_;
};

std::unique_ptr<Backend> make_backend(const BackendConfig& cfg);

}  // namespace repofill
