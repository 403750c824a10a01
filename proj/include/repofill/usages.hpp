#pragma once

#include <string>
#include <vector>

#include "repofill/essentials.hpp"
#include "repofill/index.hpp"
#include "repofill/similarity.hpp"
#include "repofill/sketch.hpp"

namespace repofill {

/// A method that references at least one essential element, before ranking.
struct UsageCandidate {
    const MethodDecl* method = nullptr;
    std::vector<std::string> via_elements;  // qualified names, sorted, nonempty
};

/// A usage scored against the sketch.
struct RankedUsage {
    const MethodDecl* method = nullptr;
    double score = 0.0;
    std::vector<std::string> via_elements;
};

struct RankingOutcome {
    std::vector<RankedUsage> usages;  // score descending
    bool degraded = false;            // sketch had no tokens; order is lexicographic
};

/// Everything the prompt renderer needs: ranked usages, the
/// signature-similar methods, and the sketch that drove retrieval.
struct ContextBundle {
    std::vector<RankedUsage> usages;                   // deduplicated against L
    std::vector<const MethodDecl*> signature_similar;  // L, most similar first
    Sketch sketch;
    std::string mode = "normal";  // "normal" | "oracle"
    bool ranking_degraded = false;
};

/// Union of the usage sets of every essential element, deduplicated, with
/// the infilling method excluded. Sorted by qualified name.
std::vector<UsageCandidate> extract_usages(const RepositoryIndex& index,
                                           const EssentialElements& essentials,
                                           const MethodDecl* infilling = nullptr);

/// Scores each candidate by body-to-sketch similarity and keeps the best k.
/// A token-empty sketch body makes every score 0; the order then falls back
/// to qualified-name order and the outcome is flagged degraded. The result
/// does not depend on the input order of `candidates`.
RankingOutcome rank_usages(const std::vector<UsageCandidate>& candidates, const Sketch& sketch,
                           const SimilarityConfig& cfg, std::size_t k);

/// Assembles the bundle: L leads as structural reference, ranked usages
/// follow; a method present in both lists keeps only its L slot.
ContextBundle build_context(const MbcProblem& problem, std::vector<const MethodDecl*> L,
                            const RankingOutcome& ranked, Sketch sketch,
                            const std::string& mode = "normal");

}  // namespace repofill
