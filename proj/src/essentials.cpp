#include "repofill/essentials.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace repofill {

namespace {

/// Generic argmax over candidates. `better_tie` orders equal-score
/// candidates; the winner is appended to `out` (if over threshold) and a
/// trace row is always recorded.
template <typename Decl, typename TieLess>
void match_one(const std::string& category, const std::string& name, int arity,
               const std::vector<const Decl*>& pool, const EeiConfig& cfg, TieLess better_tie,
               std::vector<const Decl*>& out, std::vector<MatchTrace>& trace) {
    const Decl* best = nullptr;
    double best_score = -1.0;
    for (const Decl* cand : pool) {
        double score = name_sim(name, cand->simple_name);
        if (score > best_score || (score == best_score && best && better_tie(cand, best))) {
            best = cand;
            best_score = score;
        }
    }

    MatchTrace row;
    row.category = category;
    row.sketch_name = name;
    row.sketch_arity = arity;
    if (best && best_score >= cfg.min_name_sim) {
        row.matched_qualified_name = best->qualified_name;
        row.score = best_score;
        row.matched = true;
        out.push_back(best);
    } else {
        row.score = best ? best_score : 0.0;
    }
    trace.push_back(std::move(row));
}

template <typename Decl>
void sort_unique(std::vector<const Decl*>& v) {
    std::sort(v.begin(), v.end(), [](const Decl* a, const Decl* b) {
        return a->qualified_name < b->qualified_name;
    });
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

EssentialElements identify_essentials(const RepositoryIndex& index, const SketchAnalysis& analysis,
                                      const EeiConfig& cfg, const MethodDecl* infilling) {
    EssentialElements out;

    std::vector<const MethodDecl*> method_pool;
    for (const MethodDecl* m : accessible_methods(index)) {
        if (m != infilling) method_pool.push_back(m);
    }
    auto field_pool = accessible_fields(index);
    auto class_pool = accessible_classes(index);

    auto name_tie = [](const auto* a, const auto* b) {
        return a->qualified_name < b->qualified_name;
    };

    for (const auto& [name, arity] : analysis.called_methods) {
        auto arity_tie = [arity, &name_tie](const MethodDecl* a, const MethodDecl* b) {
            int da = std::abs(static_cast<int>(a->params.size()) - arity);
            int db = std::abs(static_cast<int>(b->params.size()) - arity);
            if (da != db) return da < db;
            return name_tie(a, b);
        };
        match_one("method", name, arity, method_pool, cfg, arity_tie, out.methods, out.trace);
    }
    for (const auto& name : analysis.accessed_fields) {
        match_one("field", name, -1, field_pool, cfg, name_tie, out.fields, out.trace);
    }
    for (const auto& name : analysis.used_types) {
        match_one("type", name, -1, class_pool, cfg, name_tie, out.classes, out.trace);
    }

    sort_unique(out.methods);
    sort_unique(out.fields);
    sort_unique(out.classes);
    return out;
}

}  // namespace repofill
