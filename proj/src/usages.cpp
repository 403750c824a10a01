#include "repofill/usages.hpp"

#include <algorithm>
#include <map>

#include "repofill/text.hpp"

namespace repofill {

namespace {

void collect(const RepositoryIndex& index, ElementKind kind, const std::string& qualified,
             const MethodDecl* infilling,
             std::map<std::string, UsageCandidate>& by_name) {
    for (const MethodDecl* user : usages_of(index, ElementRef{kind, qualified})) {
        if (user == infilling) continue;
        auto& cand = by_name[user->qualified_name];
        cand.method = user;
        cand.via_elements.push_back(qualified);
    }
}

}  // namespace

std::vector<UsageCandidate> extract_usages(const RepositoryIndex& index,
                                           const EssentialElements& essentials,
                                           const MethodDecl* infilling) {
    std::map<std::string, UsageCandidate> by_name;
    for (const MethodDecl* e : essentials.methods)
        collect(index, ElementKind::method, e->qualified_name, infilling, by_name);
    for (const FieldDecl* e : essentials.fields)
        collect(index, ElementKind::field, e->qualified_name, infilling, by_name);
    for (const ClassDecl* e : essentials.classes)
        collect(index, ElementKind::klass, e->qualified_name, infilling, by_name);

    std::vector<UsageCandidate> out;
    out.reserve(by_name.size());
    for (auto& [name, cand] : by_name) {
        std::sort(cand.via_elements.begin(), cand.via_elements.end());
        cand.via_elements.erase(
            std::unique(cand.via_elements.begin(), cand.via_elements.end()),
            cand.via_elements.end());
        out.push_back(std::move(cand));
    }
    return out;
}

RankingOutcome rank_usages(const std::vector<UsageCandidate>& candidates, const Sketch& sketch,
                           const SimilarityConfig& cfg, std::size_t k) {
    RankingOutcome out;
    out.degraded = tokenize(sketch.body_text).tokens.empty();
    if (k == 0 || candidates.empty()) return out;

    // Canonical order first so the outcome never depends on input order.
    std::vector<const UsageCandidate*> sorted;
    sorted.reserve(candidates.size());
    for (const auto& c : candidates) sorted.push_back(&c);
    std::sort(sorted.begin(), sorted.end(), [](const UsageCandidate* a, const UsageCandidate* b) {
        return a->method->qualified_name < b->method->qualified_name;
    });

    std::map<std::string, const UsageCandidate*> by_name;
    std::vector<std::pair<std::string, std::string>> texts;
    for (const UsageCandidate* c : sorted) {
        by_name[c->method->qualified_name] = c;
        texts.emplace_back(c->method->qualified_name,
                           c->method->body_text ? *c->method->body_text : std::string());
    }

    if (out.degraded) {
        for (const UsageCandidate* c : sorted) {
            if (out.usages.size() == k) break;
            out.usages.push_back({c->method, 0.0, c->via_elements});
        }
        return out;
    }

    for (const auto& scored : top_k(sketch.body_text, texts, k, cfg)) {
        const UsageCandidate* c = by_name.at(scored.id);
        out.usages.push_back({c->method, scored.score, c->via_elements});
    }
    return out;
}

ContextBundle build_context(const MbcProblem&, std::vector<const MethodDecl*> L,
                            const RankingOutcome& ranked, Sketch sketch,
                            const std::string& mode) {
    ContextBundle bundle;
    bundle.signature_similar = std::move(L);
    bundle.sketch = std::move(sketch);
    bundle.mode = mode;
    bundle.ranking_degraded = ranked.degraded;
    for (const auto& usage : ranked.usages) {
        bool in_l = std::any_of(bundle.signature_similar.begin(), bundle.signature_similar.end(),
                                [&](const MethodDecl* m) {
                                    return m->qualified_name == usage.method->qualified_name;
                                });
        if (!in_l) bundle.usages.push_back(usage);
    }
    return bundle;
}

}  // namespace repofill
