#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "repofill/text.hpp"

namespace repofill {

/// Fixed-length real vector from an embedding provider.
struct EmbeddingVector {
    std::vector<double> values;
    std::string provider_id;
};

/// Source of text embeddings (usually an HTTP endpoint; tests plug in
/// an in-process fake).
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::string id() const = 0;
    /// Embeds a batch of texts; result has one vector per input, same order.
    /// Throws std::runtime_error("embedding provider unavailable") when the
    /// endpoint cannot be reached or answers garbage.
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
};

enum class SimMode { lexical, semantic, hybrid };

SimMode parse_sim_mode(std::string_view name);  // throws on unknown name
std::string to_string(SimMode mode);

struct SimilarityConfig {
    SimMode mode = SimMode::lexical;
    EmbeddingProvider* provider = nullptr;  // required for semantic/hybrid
};

/// dot(a,b) / (|a||b|); 0.0 if either norm is zero.
/// Throws std::invalid_argument on length mismatch.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

/// Similarity of two texts in [0,1] under the configured mode.
/// lexical: jaccard over token bags. semantic: cosine mapped via (x+1)/2.
/// hybrid: mean of the two. semantic/hybrid require a reachable provider
/// (no silent fallback).
double sim(std::string_view a, std::string_view b, const SimilarityConfig& cfg);

/// Jaccard over identifier subtokens, e.g. getUserById vs getUserByName = 0.6.
double name_sim(std::string_view a, std::string_view b);

struct ScoredId {
    std::string id;
    double score = 0.0;
};

/// Scores every candidate against the query and returns the best k,
/// sorted by score descending with ties broken by ascending id.
/// In semantic/hybrid mode all texts are embedded in one provider batch.
std::vector<ScoredId> top_k(std::string_view query,
                            const std::vector<std::pair<std::string, std::string>>& candidates,
                            std::size_t k, const SimilarityConfig& cfg);

}  // namespace repofill
