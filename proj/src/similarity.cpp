#include "repofill/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace repofill {

SimMode parse_sim_mode(std::string_view name) {
    if (name == "lexical") return SimMode::lexical;
    if (name == "semantic") return SimMode::semantic;
    if (name == "hybrid") return SimMode::hybrid;
    throw std::invalid_argument("unknown similarity mode: " + std::string(name));
}

std::string to_string(SimMode mode) {
    switch (mode) {
        case SimMode::lexical: return "lexical";
        case SimMode::semantic: return "semantic";
        case SimMode::hybrid: return "hybrid";
    }
    return "lexical";
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("embedding length mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

EmbeddingProvider& require_provider(const SimilarityConfig& cfg) {
    if (cfg.provider == nullptr)
        throw std::runtime_error("embedding provider unavailable");
    return *cfg.provider;
}

double clamp01(double cos_score) { return (cos_score + 1.0) / 2.0; }

}  // namespace

double sim(std::string_view a, std::string_view b, const SimilarityConfig& cfg) {
    double lex = 0.0;
    if (cfg.mode != SimMode::semantic) lex = jaccard(tokenize(a), tokenize(b));
    if (cfg.mode == SimMode::lexical) return lex;

    auto vecs = require_provider(cfg).embed({std::string(a), std::string(b)});
    if (vecs.size() != 2) throw std::runtime_error("embedding provider unavailable");
    double sem = clamp01(cosine(vecs[0], vecs[1]));
    if (cfg.mode == SimMode::semantic) return sem;
    return (lex + sem) / 2.0;
}

double name_sim(std::string_view a, std::string_view b) {
    return jaccard(tokenize(a), tokenize(b));
}

std::vector<ScoredId> top_k(std::string_view query,
                            const std::vector<std::pair<std::string, std::string>>& candidates,
                            std::size_t k, const SimilarityConfig& cfg) {
    std::vector<ScoredId> scored;
    scored.reserve(candidates.size());

    if (cfg.mode == SimMode::lexical) {
        TokenBag q = tokenize(query);
        for (const auto& [id, text] : candidates)
            scored.push_back({id, jaccard(q, tokenize(text))});
    } else {
        // One provider round-trip for the query plus every candidate.
        std::vector<std::string> batch;
        batch.reserve(candidates.size() + 1);
        batch.emplace_back(query);
        for (const auto& [id, text] : candidates) batch.push_back(text);
        auto vecs = require_provider(cfg).embed(batch);
        if (vecs.size() != batch.size())
            throw std::runtime_error("embedding provider unavailable");

        TokenBag q;
        if (cfg.mode == SimMode::hybrid) q = tokenize(query);
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            double sem = clamp01(cosine(vecs[0], vecs[i + 1]));
            double s = sem;
            if (cfg.mode == SimMode::hybrid)
                s = (jaccard(q, tokenize(candidates[i].second)) + sem) / 2.0;
            scored.push_back({candidates[i].first, s});
        }
    }

    std::stable_sort(scored.begin(), scored.end(), [](const ScoredId& a, const ScoredId& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

}  // namespace repofill
