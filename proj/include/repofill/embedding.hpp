#pragma once

#include <string>

#include "repofill/similarity.hpp"

namespace repofill {

struct EmbeddingConfig {
    std::string endpoint;  // full URL of the embeddings route
    std::string model;
    std::string auth_env = "REPOFILL_API_TOKEN";
    double timeout_seconds = 60.0;
    int batch_size = 64;
    int parallelism = 4;  // concurrent batch requests
};

/// HTTP embedding provider speaking the common embeddings wire format:
/// POST {"model": ..., "input": ["...", ...]} ->
/// {"data": [{"embedding": [...]}, ...]} with one vector per input.
/// Any transport or shape failure surfaces as
/// std::runtime_error("embedding provider unavailable").
class HttpEmbeddingProvider : public EmbeddingProvider {
public:
    explicit HttpEmbeddingProvider(EmbeddingConfig cfg);
    std::string id() const override;
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

private:
    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts);
    EmbeddingConfig cfg_;
    std::string base_;
    std::string path_;
};

}  // namespace repofill
