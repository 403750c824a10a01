#include "repofill/prompt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "repofill/java_lexer.hpp"
#include "repofill/text.hpp"

namespace repofill {

namespace {

struct SnippetEntry {
    const MethodDecl* method;
    std::string rendered;
    std::size_t cost;
};

/// True when every '{' in `text` closes and no '}' is unmatched.
bool braces_balanced(const std::string& text) {
    auto lexed = lex_java(text);
    int depth = 0;
    for (const auto& tok : lexed.tokens) {
        if (tok.kind != JTok::punct) continue;
        if (tok.text == "{") ++depth;
        if (tok.text == "}" && --depth < 0) return false;
    }
    return depth == 0;
}

}  // namespace

RenderedPrompt render_prompt(const MbcProblem& problem, const ContextBundle& bundle,
                             std::size_t budget, const PromptConfig& cfg) {
    double scale = cfg.token_scale > 0.0 ? cfg.token_scale : 1.0;
    auto fits = [&](std::size_t tokens) {
        return static_cast<double>(tokens) * scale <= static_cast<double>(budget);
    };

    auto assemble = [&](const std::string& snippets) {
        return render_template(cfg.template_text, {{"snippets", snippets},
                                                   {"left", problem.left_context},
                                                   {"signature", problem.signature_text},
                                                   {"marker", cfg.marker},
                                                   {"right", problem.right_context}});
    };

    std::size_t base = token_count(assemble(""));
    if (!fits(base)) throw std::runtime_error("context exceeds budget");

    // Descending relevance: signature-similar methods lead, ranked usages
    // follow in score order (the bundle's own order).
    std::vector<SnippetEntry> ordered;
    for (const MethodDecl* m : bundle.signature_similar) {
        std::string rendered = render_method_snippet(*m);
        std::size_t cost = token_count(rendered);
        ordered.push_back({m, std::move(rendered), cost});
    }
    for (const RankedUsage& u : bundle.usages) {
        std::string rendered = render_method_snippet(*u.method);
        std::size_t cost = token_count(rendered);
        ordered.push_back({u.method, std::move(rendered), cost});
    }

    RenderedPrompt out;
    std::size_t used = base;
    std::size_t admitted = 0;
    for (; admitted < ordered.size(); ++admitted) {
        if (!fits(used + ordered[admitted].cost)) break;
        used += ordered[admitted].cost;
    }
    out.truncated = admitted < ordered.size();

    auto render_admitted = [&](std::size_t n) {
        std::string snippets;
        out.included_snippets.clear();
        for (std::size_t i = n; i-- > 0;) {  // ascending relevance
            snippets += ordered[i].rendered;
            out.included_snippets.emplace_back(ordered[i].method->span.file_path,
                                               ordered[i].method->qualified_name);
        }
        out.text = assemble(snippets);
        out.token_count = token_count(out.text);
    };

    render_admitted(admitted);
    // Token counts are additive at snippet boundaries, so this loop should
    // never fire; it pins the budget invariant regardless.
    while (!fits(out.token_count) && admitted > 0) {
        --admitted;
        out.truncated = true;
        render_admitted(admitted);
    }
    return out;
}

Completion complete(const MbcProblem& problem, const ContextBundle& bundle, Backend& backend,
                    const PromptConfig& cfg) {
    Completion out;
    out.prompt = render_prompt(problem, bundle, cfg.generation_budget, cfg);

    GenerationRequest req;
    req.prompt = out.prompt.text;
    req.signature_hint = problem.signature_text;
    req.temperature = cfg.temperature;
    req.max_tokens = cfg.max_output_tokens;
    GenerationResponse res = backend.generate(req);

    out.raw_llm_output = res.text;
    std::string body = extract_code_body(res.text, problem.signature_text);
    if (!body.empty() && braces_balanced(body)) {
        out.body_text = std::move(body);
        out.extraction_ok = true;
    }
    return out;
}

}  // namespace repofill
