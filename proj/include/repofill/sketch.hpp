#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "repofill/backend.hpp"
#include "repofill/index.hpp"
#include "repofill/similarity.hpp"

namespace repofill {

/// One method-body completion task: the method header, the surrounding file
/// text with the body removed, and (in evaluation mode) the original body.
struct MbcProblem {
    std::string repo_root;
    std::string file_path;               // repo-relative
    std::string left_context;            // file text before the method, imports stripped
    std::string right_context;           // file text after the body
    std::string signature_text;          // the method header being completed
    std::optional<std::string> reference_body;  // evaluation only
    SourceSpan body_start;               // byte range of the body in the original file
};

/// First-pass draft body produced without repository context.
struct Sketch {
    std::string body_text;       // extracted body incl. outer braces; "" on failure
    std::string raw_llm_output;  // full backend response
    bool parse_ok = false;
};

/// Candidate element names mined from a sketch: called methods with arity,
/// field-like accesses, and referenced types.
struct SketchAnalysis {
    std::set<std::pair<std::string, int>> called_methods;
    std::set<std::string> accessed_fields;
    std::set<std::string> used_types;
    bool degraded = false;  // structured scan failed; token-level fallback used
};

struct SketchConfig {
    std::size_t k_signature = 5;       // how many signature-similar methods to retrieve
    std::size_t sketch_budget = 2048;  // prompt token budget for the draft request
    int n_sketches = 1;                // >1 warns; a single draft is always generated
    std::string template_text =
        "// Complete the body of the final method.\n{snippets}{left}\n{signature}\n";
};

/// The method whose body the problem asks for, when the indexed snapshot
/// still contains it (mined benchmarks); null otherwise.
const MethodDecl* find_infilling_method(const RepositoryIndex& index, const MbcProblem& problem);

/// Comment-rendered method source with a `// path:` header line, the form
/// snippets take inside prompts.
std::string render_method_snippet(const MethodDecl& m);

/// Top-k accessible methods by signature-string similarity, excluding the
/// infilling method itself. Most similar first.
std::vector<const MethodDecl*> retrieve_signature_similar(const RepositoryIndex& index,
                                                          const MbcProblem& problem,
                                                          std::size_t k,
                                                          const SimilarityConfig& cfg);

/// Pulls a method body out of raw model output: the first balanced-brace
/// block after an echo of `signature`, else the first code fence. Empty
/// string when nothing extractable.
std::string extract_code_body(const std::string& raw, const std::string& signature);

/// Asks the backend for a draft body using the signature-similar methods as
/// commented reference snippets (rendered in ascending relevance). Backend
/// errors propagate.
Sketch generate_sketch(const MbcProblem& problem, const std::vector<const MethodDecl*>& L,
                       Backend& backend, const SketchConfig& cfg);

/// Lenient static analysis of a sketch body. Never throws: when the
/// structured scan fails the token-level fallback runs and the result is
/// marked degraded.
SketchAnalysis analyze_sketch(const Sketch& sketch);

}  // namespace repofill
