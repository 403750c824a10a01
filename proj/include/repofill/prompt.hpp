#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "repofill/backend.hpp"
#include "repofill/sketch.hpp"
#include "repofill/usages.hpp"

namespace repofill {

struct PromptConfig {
    std::size_t generation_budget = 4096;  // prompt token budget
    double token_scale = 1.0;   // backend tokens per artifact token; >1 shrinks the budget
    std::string marker = "/* complete the method body */";
    std::string template_text = "{snippets}{left}\n{signature} {marker}\n{right}";
    double temperature = 0.0;
    int max_output_tokens = 1024;
};

struct RenderedPrompt {
    std::string text;
    std::size_t token_count = 0;  // artifact tokens of `text`
    // (file_path, method qualified_name) in rendered order = ascending relevance.
    std::vector<std::pair<std::string, std::string>> included_snippets;
    bool truncated = false;  // at least one snippet did not fit
};

struct Completion {
    std::string body_text;  // brace-balanced when extraction_ok
    std::string raw_llm_output;
    RenderedPrompt prompt;
    bool extraction_ok = false;
};

/// Renders the generation prompt. Snippets (signature-similar methods
/// leading, then ranked usages) are admitted greedily from the most
/// relevant downward until one no longer fits the budget, then rendered in
/// ascending relevance so the strongest reference sits next to the code.
/// Throws std::runtime_error("context exceeds budget") when the file
/// context plus signature alone exceed the budget.
RenderedPrompt render_prompt(const MbcProblem& problem, const ContextBundle& bundle,
                             std::size_t budget, const PromptConfig& cfg = {});

/// Renders, calls the backend once (its own retry policy applies), and
/// extracts the completed body. Extraction failures yield an empty
/// body_text with extraction_ok=false; backend errors propagate.
Completion complete(const MbcProblem& problem, const ContextBundle& bundle, Backend& backend,
                    const PromptConfig& cfg = {});

}  // namespace repofill
