#pragma once

#include <string>
#include <vector>

#include "repofill/index.hpp"
#include "repofill/sketch.hpp"

namespace repofill {

/// One row per sketch name explaining what it resolved to (or why not).
struct MatchTrace {
    std::string category;     // "method" | "field" | "type"
    std::string sketch_name;
    int sketch_arity = -1;    // methods only
    std::string matched_qualified_name;  // empty below threshold
    double score = 0.0;
    bool matched = false;
};

/// Repository elements the completion will actually need: the best
/// name-similarity match per sketch name, filtered by a minimum score.
struct EssentialElements {
    std::vector<const MethodDecl*> methods;  // sorted by qualified_name, deduplicated
    std::vector<const FieldDecl*> fields;
    std::vector<const ClassDecl*> classes;
    std::vector<MatchTrace> trace;           // covers every input name
};

struct EeiConfig {
    double min_name_sim = 0.5;  // matches scoring below this are dropped
};

/// Maps each candidate name from the sketch analysis to the accessible
/// repository element with the highest name similarity. Ties between
/// method candidates prefer the closer arity, then the lexicographically
/// smaller qualified name; field and type ties use the name order alone.
/// The infilling method never matches itself.
EssentialElements identify_essentials(const RepositoryIndex& index, const SketchAnalysis& analysis,
                                      const EeiConfig& cfg,
                                      const MethodDecl* infilling = nullptr);

}  // namespace repofill
