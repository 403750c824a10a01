#include "repofill/sketch.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "repofill/body_scan.hpp"
#include "repofill/java_lexer.hpp"
#include "repofill/text.hpp"

namespace repofill {

namespace {

/// Substring of `text` covering the first balanced `{...}` block at or after
/// `from`, braces included; empty when no such block closes.
std::string balanced_block_after(const std::string& text, std::size_t from) {
    std::string_view tail = std::string_view(text).substr(from);
    auto lexed = lex_java(tail);
    std::size_t open = lexed.tokens.size();
    for (std::size_t i = 0; i < lexed.tokens.size(); ++i) {
        if (lexed.tokens[i].kind == JTok::punct && lexed.tokens[i].text == "{") {
            open = i;
            break;
        }
    }
    if (open == lexed.tokens.size()) return "";
    int depth = 0;
    for (std::size_t i = open; i < lexed.tokens.size(); ++i) {
        const auto& tok = lexed.tokens[i];
        if (tok.kind != JTok::punct) continue;
        if (tok.text == "{") ++depth;
        if (tok.text == "}" && --depth == 0) {
            std::size_t start = from + lexed.tokens[open].byte;
            std::size_t stop = from + tok.byte + 1;
            return text.substr(start, stop - start);
        }
    }
    return "";
}

/// Naive argument count for the token-level fallback: commas at paren
/// depth 1 between toks[open] == '(' and its match.
int fallback_arity(const std::vector<JavaToken>& toks, std::size_t open) {
    int depth = 0;
    bool any = false;
    int commas = 0;
    for (std::size_t i = open; i < toks.size(); ++i) {
        if (toks[i].kind != JTok::punct) {
            any = true;
            continue;
        }
        if (toks[i].text == "(") ++depth;
        else if (toks[i].text == ")") {
            if (--depth == 0) return any || commas > 0 ? commas + 1 : 0;
        } else if (toks[i].text == "," && depth == 1) {
            ++commas;
        } else {
            any = true;
        }
    }
    return commas > 0 ? commas + 1 : (any ? 1 : 0);
}

}  // namespace

const MethodDecl* find_infilling_method(const RepositoryIndex& index, const MbcProblem& problem) {
    for (const auto& m : index.methods) {
        if (m.span.file_path != problem.file_path) continue;
        if (m.span.start_byte <= problem.body_start.start_byte &&
            problem.body_start.start_byte < m.span.end_byte) {
            return &m;
        }
    }
    return nullptr;
}

std::string render_method_snippet(const MethodDecl& m) {
    std::string source = signature_text(m);
    if (m.body_text) {
        source += ' ';
        source += *m.body_text;
    } else {
        source += ';';
    }
    std::string out = "// path: " + m.span.file_path + "\n";
    for (auto line : split_lines(source)) {
        out += "// ";
        out += line;
        out += '\n';
    }
    return out;
}

std::vector<const MethodDecl*> retrieve_signature_similar(const RepositoryIndex& index,
                                                          const MbcProblem& problem,
                                                          std::size_t k,
                                                          const SimilarityConfig& cfg) {
    if (k == 0) return {};
    const MethodDecl* self = find_infilling_method(index, problem);
    std::vector<std::pair<std::string, std::string>> candidates;
    for (const MethodDecl* m : accessible_methods(index)) {
        if (m == self) continue;
        candidates.emplace_back(m->qualified_name, signature_text(*m));
    }
    auto scored = top_k(problem.signature_text, candidates, k, cfg);
    std::vector<const MethodDecl*> out;
    out.reserve(scored.size());
    for (const auto& s : scored) out.push_back(index.find_method(s.id));
    return out;
}

std::string extract_code_body(const std::string& raw, const std::string& signature) {
    if (!signature.empty()) {
        auto echo = raw.find(signature);
        if (echo != std::string::npos) {
            auto block = balanced_block_after(raw, echo + signature.size());
            if (!block.empty()) return block;
        }
    }
    auto fence = raw.find("```");
    if (fence != std::string::npos) {
        auto tag_end = raw.find('\n', fence);
        auto close = raw.find("```", fence + 3);
        if (tag_end != std::string::npos && close != std::string::npos && tag_end < close) {
            std::string contents = raw.substr(tag_end + 1, close - tag_end - 1);
            if (!signature.empty()) {
                auto echo = contents.find(signature);
                if (echo != std::string::npos) {
                    auto block = balanced_block_after(contents, echo + signature.size());
                    if (!block.empty()) return block;
                }
            }
            // A fence holding only whitespace is as useless as no fence.
            if (contents.find_first_not_of(" \t\r\n") != std::string::npos) return contents;
        }
    }
    return "";
}

Sketch generate_sketch(const MbcProblem& problem, const std::vector<const MethodDecl*>& L,
                       Backend& backend, const SketchConfig& cfg) {
    if (cfg.n_sketches != 1) {
        std::fprintf(stderr, "note: n_sketches=%d requested; generating a single draft\n",
                     cfg.n_sketches);
    }

    auto assemble = [&](const std::string& snippets) {
        return render_template(cfg.template_text, {{"snippets", snippets},
                                                   {"left", problem.left_context},
                                                   {"signature", problem.signature_text}});
    };

    // Greedy admission most-relevant-first under the budget, rendered in
    // ascending relevance so the strongest reference sits nearest the query.
    std::size_t used = token_count(assemble(""));
    std::vector<std::string> admitted;
    for (const MethodDecl* m : L) {
        std::string snippet = render_method_snippet(*m);
        std::size_t cost = token_count(snippet);
        if (used + cost > cfg.sketch_budget) break;
        used += cost;
        admitted.push_back(std::move(snippet));
    }
    std::string snippets;
    for (auto it = admitted.rbegin(); it != admitted.rend(); ++it) snippets += *it;

    GenerationRequest req;
    req.prompt = assemble(snippets);
    req.signature_hint = problem.signature_text;
    GenerationResponse res = backend.generate(req);

    Sketch sketch;
    sketch.raw_llm_output = res.text;
    sketch.body_text = extract_code_body(res.text, problem.signature_text);
    sketch.parse_ok = !sketch.body_text.empty();
    return sketch;
}

SketchAnalysis analyze_sketch(const Sketch& sketch) {
    SketchAnalysis out;
    const std::string& body = sketch.body_text;
    if (body.empty()) return out;

    auto lexed = lex_java(body);
    BodyScan scan = scan_java_statements(lexed.tokens, 0, lexed.tokens.size(), {});
    if (lexed.error_count == 0 && scan.balanced) {
        for (const auto& hit : scan.calls) out.called_methods.insert({hit.name, hit.arity});
        for (const auto& hit : scan.field_reads) out.accessed_fields.insert(hit.name);
        for (const auto& hit : scan.type_uses) out.used_types.insert(hit.name);
        return out;
    }

    // Token-level fallback: calls are identifiers followed by '(', types are
    // capitalized identifiers, fields are identifiers touching a '.'.
    out.degraded = true;
    const auto& toks = lexed.tokens;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (toks[i].kind != JTok::ident) continue;
        std::string name(toks[i].text);
        bool next_is_call = i + 1 < toks.size() && toks[i + 1].kind == JTok::punct &&
                            toks[i + 1].text == "(";
        if (next_is_call) {
            out.called_methods.insert({name, fallback_arity(toks, i + 1)});
        } else if (std::isupper(static_cast<unsigned char>(name[0]))) {
            out.used_types.insert(name);
        } else {
            bool prev_dot = i > 0 && toks[i - 1].kind == JTok::punct && toks[i - 1].text == ".";
            bool next_dot = i + 1 < toks.size() && toks[i + 1].kind == JTok::punct &&
                            toks[i + 1].text == ".";
            if (prev_dot || next_dot) out.accessed_fields.insert(name);
        }
    }
    return out;
}

}  // namespace repofill
