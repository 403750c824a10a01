#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>
#include <string>

#include "repofill/body_scan.hpp"
#include "repofill/index.hpp"
#include "repofill/java_lexer.hpp"
#include "repofill/text.hpp"

namespace repofill {

namespace {

bool is_modifier(const JavaToken& t) {
    static const std::set<std::string_view> mods = {
        "public", "private",      "protected", "static",   "final",
        "abstract", "native",     "synchronized", "transient", "volatile",
        "strictfp", "default",
    };
    return mods.count(t.text) != 0;
}

bool is_word(const JavaToken& t) {
    return t.kind == JTok::ident || t.kind == JTok::keyword || t.kind == JTok::number;
}

// Reconstructs type/signature text from a token run: tight joins except
// between two word tokens ("Map<String,Integer>", "String...").
std::string join_tokens(const std::vector<JavaToken>& toks, std::size_t from, std::size_t to) {
    std::string out;
    for (std::size_t i = from; i < to; ++i) {
        if (!out.empty() && is_word(toks[i]) && is_word(toks[i - 1])) out += ' ';
        out += toks[i].text;
    }
    return out;
}

std::size_t skip_generics(const std::vector<JavaToken>& toks, std::size_t i) {
    if (i >= toks.size() || toks[i].text != "<") return i;
    int depth = 0;
    while (i < toks.size()) {
        std::string_view t = toks[i].text;
        if (t == "<") ++depth;
        else if (t == ">" || t == ">>" || t == ">>>") {
            depth -= static_cast<int>(t.size());
            if (depth <= 0) return i + 1;
        }
        ++i;
    }
    return i;
}

std::size_t skip_balanced(const std::vector<JavaToken>& toks, std::size_t open,
                          std::string_view opener, std::string_view closer) {
    int depth = 0;
    std::size_t i = open;
    while (i < toks.size()) {
        if (toks[i].text == opener) ++depth;
        else if (toks[i].text == closer) {
            --depth;
            if (depth == 0) return i + 1;
        }
        ++i;
    }
    return i;
}

struct TypeCtx {
    std::string qualified;
    std::string simple;
};

struct Parser {
    std::string_view src;
    const std::vector<JavaToken>& toks;
    std::string path;
    bool is_test;
    FileDecls out;

    std::string package_;
    std::vector<TypeCtx> stack;
    std::size_t i = 0;

    bool at_end() const { return i >= toks.size(); }
    const JavaToken& cur() const { return toks[i]; }
    bool cur_is(std::string_view s) const { return !at_end() && toks[i].text == s; }

    SourceSpan span_of(std::size_t from_tok, std::size_t to_tok_excl) const {
        SourceSpan s;
        s.file_path = path;
        const JavaToken& a = toks[from_tok];
        const JavaToken& b = toks[to_tok_excl > from_tok ? to_tok_excl - 1 : from_tok];
        s.start_line = a.line;
        s.end_line = b.line;
        s.start_byte = a.byte;
        s.end_byte = b.byte + b.text.size();
        return s;
    }

    void warn(const std::string& msg) { out.warnings.push_back(path + ": " + msg); }

    std::string owner_qualified() const {
        return stack.empty() ? package_ : stack.back().qualified;
    }

    void run() {
        if (cur_is("package")) {
            ++i;
            std::string name;
            while (!at_end() && !cur_is(";")) {
                name += cur().text;
                ++i;
            }
            if (!at_end()) ++i;
            package_ = name;
        }
        while (!at_end()) {
            if (cur_is("import")) {
                while (!at_end() && !cur_is(";")) ++i;
                if (!at_end()) ++i;
                continue;
            }
            if (cur_is(";")) {
                ++i;
                continue;
            }
            std::size_t before = i;
            parse_type_decl();
            if (i == before) ++i;  // always make progress
        }
    }

    // Skips one annotation (@Name(.Name)* with optional argument list).
    void skip_annotation() {
        ++i;  // '@'
        while (!at_end() && cur().kind == JTok::ident) {
            ++i;
            if (cur_is("."))
                ++i;
            else
                break;
        }
        if (cur_is("(")) i = skip_balanced(toks, i, "(", ")");
    }

    // Skips annotations and modifiers (incl. sealed / non-sealed).
    void skip_decorations() {
        while (!at_end()) {
            if (cur_is("@")) {
                // '@interface' is a declaration, not an annotation
                if (i + 1 < toks.size() && toks[i + 1].text == "interface") return;
                skip_annotation();
                continue;
            }
            if (is_modifier(cur())) {
                ++i;
                continue;
            }
            if (cur().kind == JTok::ident && cur().text == "sealed") {
                ++i;
                continue;
            }
            if (cur().kind == JTok::ident && cur().text == "non" && i + 2 < toks.size() &&
                toks[i + 1].text == "-" && toks[i + 2].text == "sealed") {
                i += 3;
                continue;
            }
            return;
        }
    }

    bool at_type_keyword() const {
        if (at_end()) return false;
        std::string_view t = cur().text;
        if (t == "class" || t == "interface" || t == "enum") return true;
        if (t == "@" && i + 1 < toks.size() && toks[i + 1].text == "interface") return true;
        if (t == "record" && cur().kind == JTok::ident && i + 2 < toks.size() &&
            toks[i + 1].kind == JTok::ident && toks[i + 2].text == "(")
            return true;
        return false;
    }

    void parse_type_decl() {
        std::size_t decl_start = i;
        skip_decorations();
        if (!at_type_keyword()) {
            // top level noise; resync to the next type keyword
            warn("unexpected tokens at type level");
            while (!at_end() && !at_type_keyword()) ++i;
            if (at_end()) return;
            decl_start = i;
        }
        bool is_enum = cur_is("enum");
        bool is_record = cur().kind == JTok::ident && cur().text == "record";
        if (cur_is("@")) ++i;  // @interface
        ++i;                   // class/interface/enum/record/interface
        if (at_end() || cur().kind != JTok::ident) {
            warn("type declaration without a name");
            return;
        }
        std::string simple(cur().text);
        ++i;

        std::string qualified = owner_qualified().empty() ? simple
                                                          : owner_qualified() + "." + simple;
        stack.push_back({qualified, simple});

        i = skip_generics(toks, i);

        std::vector<std::pair<std::string, std::string>> record_components;
        if (is_record && cur_is("(")) {
            std::size_t close = skip_balanced(toks, i, "(", ")");
            record_components = parse_params(i, close - 1);
            i = close;
        }
        // extends / implements / permits — skip to the body
        while (!at_end() && !cur_is("{") && !cur_is(";")) {
            if (cur_is("(")) {
                i = skip_balanced(toks, i, "(", ")");
                continue;
            }
            i = cur_is("<") ? skip_generics(toks, i) : i + 1;
        }
        if (!cur_is("{")) {  // e.g. `;` after a degenerate decl
            ClassDecl c{qualified, simple, span_of(decl_start, i), is_test};
            out.classes.push_back(std::move(c));
            stack.pop_back();
            if (!at_end()) ++i;
            return;
        }
        std::size_t body_open = i;
        std::size_t body_close_excl = skip_balanced(toks, i, "{", "}");
        ClassDecl c{qualified, simple, span_of(decl_start, body_close_excl), is_test};
        out.classes.push_back(std::move(c));

        for (const auto& [type_text, name] : record_components) {
            FieldDecl f{qualified + "." + name, name, qualified, type_text,
                        span_of(decl_start, body_open), is_test};
            out.fields.push_back(std::move(f));
        }

        ++i;  // '{'
        if (is_enum) parse_enum_constants(body_close_excl - 1);
        while (!at_end() && i < body_close_excl - 1) {
            std::size_t before = i;
            parse_member(body_close_excl - 1);
            if (i == before) ++i;
        }
        i = body_close_excl;
        stack.pop_back();
    }

    void parse_enum_constants(std::size_t body_close) {
        while (!at_end() && i < body_close) {
            while (cur_is("@")) skip_annotation();
            if (cur_is(";")) {
                ++i;
                return;  // members follow
            }
            if (i >= body_close || cur().kind != JTok::ident) return;
            std::size_t name_tok = i;
            std::string name(cur().text);
            ++i;
            if (cur_is("(")) i = skip_balanced(toks, i, "(", ")");
            std::size_t const_end = i;
            if (cur_is("{")) {
                i = skip_balanced(toks, i, "{", "}");
                const_end = i;
            }
            FieldDecl f{stack.back().qualified + "." + name, name, stack.back().qualified,
                        stack.back().simple, span_of(name_tok, std::max(const_end, name_tok + 1)),
                        is_test};
            out.fields.push_back(std::move(f));
            if (cur_is(","))
                ++i;
            else if (cur_is(";")) {
                ++i;
                return;
            } else
                return;
        }
    }

    std::vector<std::pair<std::string, std::string>> parse_params(std::size_t open,
                                                                  std::size_t close) {
        std::vector<std::pair<std::string, std::string>> params;
        std::size_t j = open + 1;
        while (j < close) {
            // one comma group
            std::size_t group_start = j;
            int depth = 0;
            std::size_t group_end = j;
            while (group_end < close) {
                std::string_view t = toks[group_end].text;
                if (t == "(" || t == "[" || t == "{") ++depth;
                else if (t == ")" || t == "]" || t == "}") --depth;
                else if (t == "<") {
                    group_end = skip_generics(toks, group_end) - 1;
                } else if (t == "," && depth == 0)
                    break;
                ++group_end;
            }
            // strip annotations and 'final'
            std::size_t k = group_start;
            while (k < group_end) {
                if (toks[k].text == "@") {
                    std::size_t save = i;
                    i = k;
                    skip_annotation();
                    k = i;
                    i = save;
                    continue;
                }
                if (toks[k].text == "final") {
                    ++k;
                    continue;
                }
                break;
            }
            if (k < group_end) {
                // last ident is the name; the rest is the type
                std::size_t name_idx = group_end;
                for (std::size_t m = group_end; m > k; --m) {
                    if (toks[m - 1].kind == JTok::ident) {
                        name_idx = m - 1;
                        break;
                    }
                }
                if (name_idx < group_end || name_idx > k) {
                    std::string type_text = join_tokens(toks, k, name_idx);
                    std::string name(toks[name_idx].text);
                    if (name == "this") {
                        // receiver parameter — not a real param
                    } else if (!type_text.empty()) {
                        params.emplace_back(std::move(type_text), std::move(name));
                    }
                }
            }
            j = group_end + 1;
        }
        return params;
    }

    void parse_member(std::size_t body_close) {
        std::size_t member_start = i;
        skip_decorations();
        if (at_end() || i >= body_close) return;
        if (cur_is(";")) {
            ++i;
            return;
        }
        if (cur_is("{")) {  // initializer block
            i = skip_balanced(toks, i, "{", "}");
            return;
        }
        if (at_type_keyword()) {
            i = member_start;
            parse_type_decl();
            return;
        }
        if (cur_is("<")) i = skip_generics(toks, i);
        if (at_end() || i >= body_close) return;

        // decisive scan: first of '(' / '=' / ';' / ',' / '{' at depth 0
        std::size_t j = i;
        char decisive = 0;
        std::size_t decisive_at = j;
        int depth = 0;
        while (j < body_close) {
            std::string_view t = toks[j].text;
            if (t == "<") {
                std::size_t g = skip_generics(toks, j);
                if (g > j + 1) {
                    j = g;
                    continue;
                }
            }
            if (t == "(" || t == "[") ++depth;
            else if (t == ")" || t == "]") --depth;
            if (depth == 0 || (depth == 1 && t == "(")) {
                if (t == "(" && depth == 1) {
                    decisive = '(';
                    decisive_at = j;
                    break;
                }
                if (depth == 0 && (t == "=" || t == ";" || t == ",")) {
                    decisive = t[0];
                    decisive_at = j;
                    break;
                }
                if (depth == 0 && t == "{") {
                    decisive = '{';
                    decisive_at = j;
                    break;
                }
            }
            ++j;
        }
        if (decisive == 0) {
            warn("unparsable member");
            i = body_close;
            return;
        }
        if (decisive == '{') {
            // compact record constructor or other unmodeled block
            i = skip_balanced(toks, decisive_at, "{", "}");
            return;
        }
        if (decisive == '(') {
            parse_method(member_start, decisive_at, body_close);
            return;
        }
        parse_field(member_start, body_close);
    }

    void parse_method(std::size_t member_start, std::size_t open_paren, std::size_t body_close) {
        // name = last ident before '('
        if (open_paren == 0 || toks[open_paren - 1].kind != JTok::ident) {
            warn("method without a name");
            i = open_paren + 1;
            return;
        }
        std::size_t name_idx = open_paren - 1;
        std::string simple(toks[name_idx].text);
        std::string return_type = join_tokens(toks, i, name_idx);
        bool is_ctor = return_type.empty();

        std::size_t close_paren = skip_balanced(toks, open_paren, "(", ")") - 1;
        auto params = parse_params(open_paren, close_paren);

        std::size_t k = close_paren + 1;
        while (k < body_close && !(toks[k].text == "{" || toks[k].text == ";")) {
            if (toks[k].text == "@") {
                std::size_t save = i;
                i = k;
                skip_annotation();
                k = i;
                i = save;
                continue;
            }
            if (toks[k].text == "default") {
                // annotation element default value runs to ';'
                while (k < body_close && toks[k].text != ";") ++k;
                break;
            }
            if (toks[k].text == "<") {
                k = skip_generics(toks, k);
                continue;
            }
            ++k;
        }

        MethodDecl m;
        m.simple_name = simple;
        m.owner_class = stack.back().qualified;
        m.return_type = return_type;
        m.params = params;
        m.is_test = is_test;
        m.is_ctor = is_ctor;
        std::string param_sig;
        for (std::size_t p = 0; p < params.size(); ++p) {
            if (p) param_sig += ",";
            param_sig += params[p].first;
        }
        m.qualified_name = m.owner_class + "." + simple + "(" + param_sig + ")";

        if (k < body_close && toks[k].text == "{") {
            std::size_t body_end_excl = skip_balanced(toks, k, "{", "}");
            m.span = span_of(member_start, body_end_excl);
            m.body_span = span_of(k, body_end_excl);
            m.body_text = std::string(
                src.substr(m.body_span.start_byte, m.body_span.end_byte - m.body_span.start_byte));
            std::size_t loc = 0;
            for (auto line : split_lines(*m.body_text))
                if (!is_blank_line(line)) ++loc;
            m.body_loc = loc;

            std::vector<std::string> seed;
            seed.reserve(params.size());
            for (const auto& [t, n] : params) seed.push_back(n);
            BodyScan scan = scan_java_statements(toks, k, body_end_excl, seed);
            auto add = [&](const std::vector<ScanHit>& hits, UsageKind kind) {
                for (const auto& h : hits) {
                    UsageEdge e;
                    e.user = m.qualified_name;
                    e.kind = kind;
                    e.target_simple_name = h.name;
                    e.arg_count = kind == UsageKind::call ? h.arity : -1;
                    e.site = SourceSpan{path, h.line, h.line, h.byte, h.end_byte};
                    out.usage_edges.push_back(std::move(e));
                }
            };
            add(scan.calls, UsageKind::call);
            add(scan.field_reads, UsageKind::field_access);
            add(scan.type_uses, UsageKind::type_use);
            i = body_end_excl;
        } else {
            // abstract/interface/annotation member: no body
            std::size_t end_excl = k < body_close ? k + 1 : body_close;
            m.span = span_of(member_start, end_excl);
            i = end_excl;
        }
        out.methods.push_back(std::move(m));
    }

    void parse_field(std::size_t member_start, std::size_t body_close) {
        // type = tokens up to the first declarator name
        std::size_t j = i;
        // find first ident such that the next token is '=', ',', ';' or '['
        std::size_t name_idx = 0;
        std::size_t k = j;
        while (k < body_close) {
            std::string_view t = toks[k].text;
            if (t == "<") {
                k = skip_generics(toks, k);
                continue;
            }
            if (toks[k].kind == JTok::ident && k + 1 < body_close) {
                std::string_view nxt = toks[k + 1].text;
                if (nxt == "=" || nxt == "," || nxt == ";" ||
                    (nxt == "[" && k + 2 < body_close && toks[k + 2].text == "]")) {
                    name_idx = k;
                    break;
                }
            }
            if (t == "=" || t == ";") break;
            ++k;
        }
        if (name_idx == 0) {
            warn("unparsable field declaration");
            while (i < body_close && !cur_is(";")) ++i;
            if (cur_is(";")) ++i;
            return;
        }
        std::string type_text = join_tokens(toks, j, name_idx);

        // declarators separated by ',' at depth 0, ending at ';'
        std::size_t stmt_end = name_idx;
        {
            int depth = 0;
            while (stmt_end < body_close) {
                std::string_view t = toks[stmt_end].text;
                if (t == "(" || t == "[" || t == "{") ++depth;
                else if (t == ")" || t == "]" || t == "}") --depth;
                else if (t == ";" && depth == 0)
                    break;
                ++stmt_end;
            }
        }
        SourceSpan stmt_span = span_of(member_start, std::min(stmt_end + 1, body_close));

        std::size_t d = name_idx;
        bool expect_name = true;
        int depth = 0;
        while (d <= stmt_end && d < body_close) {
            std::string_view t = toks[d].text;
            if (t == "(" || t == "[" || t == "{") ++depth;
            else if (t == ")" || t == "]" || t == "}") --depth;
            else if (expect_name && toks[d].kind == JTok::ident && depth == 0) {
                std::string name(toks[d].text);
                FieldDecl f{stack.back().qualified + "." + name, name, stack.back().qualified,
                            type_text, stmt_span, is_test};
                out.fields.push_back(std::move(f));
                expect_name = false;
            } else if (t == "," && depth == 0) {
                expect_name = true;
            }
            ++d;
        }
        i = std::min(stmt_end + 1, body_close);
    }
};

class JavaFrontend : public LanguageFrontend {
public:
    std::string name() const override { return "java"; }
    bool handles(const std::string& repo_path) const override {
        return repo_path.size() > 5 && repo_path.ends_with(".java");
    }
    FileDecls parse_file(std::string_view source, const std::string& repo_path,
                         bool is_test) const override {
        LexResult lexed = lex_java(source);
        Parser p{source, lexed.tokens, repo_path, is_test, {}, {}, {}, 0};
        if (lexed.error_count > 0)
            p.out.warnings.push_back(repo_path + ": lexical errors, parse may be incomplete");
        p.run();
        return std::move(p.out);
    }
};

}  // namespace

const LanguageFrontend& frontend_by_name(const std::string& name) {
    static const JavaFrontend java;
    if (name == "java") return java;
    throw std::invalid_argument("unknown frontend: " + name);
}

}  // namespace repofill
