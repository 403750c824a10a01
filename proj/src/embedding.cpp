#include "repofill/embedding.hpp"

#include <cstdlib>
#include <future>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

namespace repofill {

namespace {

/// Split a URL into (scheme://host[:port], path).
std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) return {url, "/v1/embeddings"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpEmbeddingProvider::HttpEmbeddingProvider(EmbeddingConfig cfg) : cfg_(std::move(cfg)) {
    auto [base, path] = split_url(cfg_.endpoint);
    base_ = base;
    path_ = path;
}

std::string HttpEmbeddingProvider::id() const {
    return "http:" + cfg_.model;
}

std::vector<EmbeddingVector> HttpEmbeddingProvider::embed_batch(
        const std::vector<std::string>& texts) {
    nlohmann::json body;
    body["model"] = cfg_.model;
    body["input"] = texts;

    httplib::Client client(base_);
    client.set_connection_timeout(static_cast<time_t>(cfg_.timeout_seconds), 0);
    client.set_read_timeout(static_cast<time_t>(cfg_.timeout_seconds), 0);
    httplib::Headers headers;
    if (const char* token = std::getenv(cfg_.auth_env.c_str()); token && *token) {
        headers.emplace("Authorization", std::string("Bearer ") + token);
    }

    auto result = client.Post(path_, headers, body.dump(), "application/json");
    if (!result || result->status < 200 || result->status >= 300) {
        throw std::runtime_error("embedding provider unavailable");
    }

    std::vector<EmbeddingVector> out;
    try {
        auto parsed = nlohmann::json::parse(result->body);
        const auto& data = parsed.at("data");
        if (!data.is_array() || data.size() != texts.size()) {
            throw std::runtime_error("shape");
        }
        out.reserve(data.size());
        for (const auto& item : data) {
            EmbeddingVector vec;
            vec.provider_id = id();
            for (const auto& v : item.at("embedding")) {
                vec.values.push_back(v.get<double>());
            }
            out.push_back(std::move(vec));
        }
    } catch (const std::exception&) {
        throw std::runtime_error("embedding provider unavailable");
    }
    return out;
}

std::vector<EmbeddingVector> HttpEmbeddingProvider::embed(
        const std::vector<std::string>& texts) {
    if (texts.empty()) return {};
    const int batch = cfg_.batch_size > 0 ? cfg_.batch_size : 64;

    // Chunk the inputs, then run up to cfg_.parallelism batches concurrently.
    std::vector<std::vector<std::string>> chunks;
    for (std::size_t i = 0; i < texts.size(); i += static_cast<std::size_t>(batch)) {
        auto end = std::min(texts.size(), i + static_cast<std::size_t>(batch));
        chunks.emplace_back(texts.begin() + static_cast<std::ptrdiff_t>(i),
                            texts.begin() + static_cast<std::ptrdiff_t>(end));
    }

    std::vector<std::vector<EmbeddingVector>> results(chunks.size());
    const int workers = cfg_.parallelism > 0 ? cfg_.parallelism : 1;
    for (std::size_t begin = 0; begin < chunks.size();
         begin += static_cast<std::size_t>(workers)) {
        auto end = std::min(chunks.size(), begin + static_cast<std::size_t>(workers));
        std::vector<std::future<std::vector<EmbeddingVector>>> inflight;
        for (std::size_t c = begin; c < end; ++c) {
            inflight.push_back(std::async(std::launch::async, [this, &chunks, c] {
                return embed_batch(chunks[c]);
            }));
        }
        for (std::size_t c = begin; c < end; ++c) {
            results[c] = inflight[c - begin].get();
        }
    }

    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (auto& part : results) {
        for (auto& vec : part) out.push_back(std::move(vec));
    }
    return out;
}

}  // namespace repofill
