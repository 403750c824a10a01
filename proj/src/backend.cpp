#include "repofill/backend.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "repofill/text.hpp"

namespace repofill {

namespace {

using nlohmann::json;

std::string prompt_key(const std::string& prompt) { return to_hex(fnv1a64(prompt)); }

}  // namespace

MockBackend::MockBackend(const std::string& canned_file) {
    std::ifstream in(canned_file);
    if (!in) throw std::runtime_error("cannot read canned responses: " + canned_file);
    json j = json::parse(in);
    if (j.contains("canned"))
        for (auto& [k, v] : j["canned"].items()) canned_[k] = v.get<std::string>();
    if (j.contains("graded")) {
        for (const auto& rj : j["graded"]) {
            GradedRule r;
            r.signature_token = rj.at("signature_token").get<std::string>();
            r.usage_markers = rj.at("usage_markers").get<std::vector<std::string>>();
            r.min_markers_for_full = rj.value("min_markers_for_full", 1);
            r.full_body = rj.at("full_body").get<std::string>();
            r.partial_body = rj.at("partial_body").get<std::string>();
            rules_.push_back(std::move(r));
        }
    }
}

void MockBackend::add_canned(const std::string& prompt, const std::string& response) {
    canned_[prompt_key(prompt)] = response;
}

void MockBackend::add_rule(GradedRule rule) { rules_.push_back(std::move(rule)); }

GenerationResponse MockBackend::generate(const GenerationRequest& req) {
    GenerationResponse res;
    res.prompt_tokens = token_count(req.prompt);

    auto it = canned_.find(prompt_key(req.prompt));
    if (it != canned_.end()) {
        res.text = it->second;
    } else {
        const GradedRule* rule = nullptr;
        for (const auto& r : rules_) {
            if (req.signature_hint.find(r.signature_token) != std::string::npos) {
                rule = &r;
                break;
            }
        }
        if (rule) {
            int found = 0;
            for (const auto& marker : rule->usage_markers)
                if (req.prompt.find(marker) != std::string::npos) ++found;
            res.text = found >= rule->min_markers_for_full ? rule->full_body : rule->partial_body;
        } else {
            res.text = req.signature_hint + " {\n}\n";
        }
    }
    res.output_tokens = token_count(res.text);
    return res;
}

// --- HTTP -------------------------------------------------------------------

HttpBackend::HttpBackend(BackendConfig cfg)
    : cfg_(std::move(cfg)), slots_(cfg_.parallelism > 0 ? cfg_.parallelism : 1) {
    if (cfg_.endpoint.empty() || cfg_.model.empty())
        throw std::invalid_argument("http backend requires endpoint and model");
    auto scheme_end = cfg_.endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw std::invalid_argument("backend endpoint must be a full URL");
    auto path_start = cfg_.endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        base_ = cfg_.endpoint;
        path_ = "/v1/chat/completions";
    } else {
        base_ = cfg_.endpoint.substr(0, path_start);
        path_ = cfg_.endpoint.substr(path_start);
    }
}

GenerationResponse HttpBackend::generate(const GenerationRequest& req) {
    slots_.acquire();
    struct SlotGuard {
        std::counting_semaphore<>& sem;
        ~SlotGuard() { sem.release(); }
    } guard{slots_};

    json body = {
        {"model", cfg_.model},
        {"messages", json::array({json{{"role", "user"}, {"content", req.prompt}}})},
        {"temperature", req.temperature},
        {"max_tokens", req.max_tokens},
    };
    const std::string payload = body.dump();

    const char* token = nullptr;
    if (!cfg_.auth_env.empty()) token = std::getenv(cfg_.auth_env.c_str());

    int attempts = cfg_.retries + 1;
    std::string last_error = "no attempt made";
    bool last_retryable = false;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            auto backoff = std::chrono::milliseconds(cfg_.backoff_base_ms << (attempt - 1));
            std::this_thread::sleep_for(backoff);
        }
        auto started = std::chrono::steady_clock::now();

        httplib::Client client(base_);
        client.set_connection_timeout(std::chrono::duration<double>(cfg_.timeout_seconds));
        client.set_read_timeout(std::chrono::duration<double>(cfg_.timeout_seconds));
        httplib::Headers headers;
        if (token && *token) headers.emplace("Authorization", std::string("Bearer ") + token);

        auto result = client.Post(path_, headers, payload, "application/json");
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

        if (!result) {
            last_error = "connection failed: " + httplib::to_string(result.error());
            last_retryable = true;
            continue;
        }
        int status = result->status;
        if (status == 429 || (status >= 500 && status < 600)) {
            last_error = "server returned status " + std::to_string(status);
            last_retryable = true;
            continue;
        }
        if (status < 200 || status >= 300)
            throw BackendError("backend request rejected with status " + std::to_string(status),
                               false, status);

        json parsed = json::parse(result->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty() ||
            !parsed["choices"][0].contains("message"))
            throw BackendError("malformed backend response", false, status);

        GenerationResponse res;
        res.text = parsed["choices"][0]["message"].value("content", "");
        if (parsed.contains("usage")) {
            res.prompt_tokens = parsed["usage"].value("prompt_tokens", 0);
            res.output_tokens = parsed["usage"].value("completion_tokens", 0);
        }
        res.latency_seconds = elapsed;
        return res;
    }
    throw BackendError("backend unreachable after " + std::to_string(attempts) +
                           " attempts: " + last_error,
                       last_retryable);
}

std::unique_ptr<Backend> make_backend(const BackendConfig& cfg) {
    if (cfg.kind == "mock") {
        if (!cfg.canned_file.empty()) return std::make_unique<MockBackend>(cfg.canned_file);
        return std::make_unique<MockBackend>();
    }
    if (cfg.kind == "http") return std::make_unique<HttpBackend>(cfg);
    throw std::invalid_argument("unknown backend kind: " + cfg.kind);
}

}  // namespace repofill
