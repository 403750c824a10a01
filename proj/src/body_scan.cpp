#include "repofill/body_scan.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace repofill {

namespace {

bool tok_is(const JavaToken& t, std::string_view s) { return t.text == s; }

bool all_caps(std::string_view s) {
    bool has_alpha = false;
    for (char c : s) {
        if (std::islower(static_cast<unsigned char>(c))) return false;
        if (std::isupper(static_cast<unsigned char>(c))) has_alpha = true;
    }
    return has_alpha && s.size() > 1;
}

bool starts_upper(std::string_view s) {
    return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

// Generic-argument groups look like <ident, ? extends Foo<Bar>[], ...>.
// Returns the index just past the closing '>' when `at` opens one, or 0.
// Bounded so a stray comparison operator can't send us to EOF.
std::size_t match_generics(const std::vector<JavaToken>& toks, std::size_t at, std::size_t end) {
    if (at >= end || !tok_is(toks[at], "<")) return 0;
    int depth = 0;
    std::size_t limit = std::min(end, at + 64);
    for (std::size_t i = at; i < limit; ++i) {
        const JavaToken& t = toks[i];
        if (tok_is(t, "<")) {
            ++depth;
        } else if (tok_is(t, ">") || tok_is(t, ">>") || tok_is(t, ">>>")) {
            depth -= static_cast<int>(t.text.size());
            if (depth <= 0) return i + 1;
        } else if (t.kind == JTok::ident || tok_is(t, ",") || tok_is(t, ".") ||
                   tok_is(t, "?") || tok_is(t, "&") || tok_is(t, "[") || tok_is(t, "]") ||
                   t.text == "extends" || t.text == "super" || tok_is(t, "@")) {
            // plausible inside a type argument list
        } else if (t.kind == JTok::keyword &&
                   (t.text == "int" || t.text == "long" || t.text == "byte" ||
                    t.text == "short" || t.text == "char" || t.text == "boolean" ||
                    t.text == "float" || t.text == "double")) {
            // primitive array type argument
        } else {
            return 0;  // not a generic group after all
        }
    }
    return 0;
}

struct Scanner {
    const std::vector<JavaToken>& toks;
    std::size_t end;
    BodyScan out;
    std::vector<std::set<std::string>> scopes;
    // positions already consumed by a lookahead rule
    std::set<std::size_t> skip;

    bool is_local(std::string_view name) const {
        for (const auto& s : scopes)
            if (s.count(std::string(name))) return true;
        return false;
    }
    void declare(std::string_view name) { scopes.back().insert(std::string(name)); }

    void hit(std::vector<ScanHit>& list, const JavaToken& t, int arity = -1) {
        list.push_back({std::string(t.text), arity, t.byte, t.byte + t.text.size(), t.line});
    }

    // Counts top-level commas between the parens opening at `open`.
    // Generic groups are matched so Map<K,V> arguments don't split.
    int count_args(std::size_t open, std::size_t* close_out) {
        int depth = 0;
        int commas = 0;
        bool any_token = false;
        for (std::size_t i = open; i < end; ++i) {
            const JavaToken& t = toks[i];
            if (i > open && depth == 1) {
                if (std::size_t g = match_generics(toks, i, end)) {
                    i = g - 1;
                    any_token = true;
                    continue;
                }
            }
            if (tok_is(t, "(") || tok_is(t, "{") || tok_is(t, "[")) {
                ++depth;
            } else if (tok_is(t, ")") || tok_is(t, "}") || tok_is(t, "]")) {
                --depth;
                if (depth == 0) {
                    if (close_out) *close_out = i;
                    return any_token ? commas + 1 : 0;
                }
            } else if (depth == 1) {
                if (tok_is(t, ","))
                    ++commas;
                else
                    any_token = true;
            } else if (i > open) {
                any_token = true;
            }
        }
        if (close_out) *close_out = end;
        out.balanced = false;
        return any_token ? commas + 1 : 0;
    }

    // Tries to read a type at `i`: Name(.Name)* generics? ([])*  or a
    // primitive keyword. Returns index past the type and the simple name
    // of its base (last dotted segment), or 0 when no type shape starts here.
    std::size_t match_type(std::size_t i, std::string* simple, std::size_t* simple_pos) {
        if (i >= end) return 0;
        if (toks[i].kind == JTok::keyword) {
            static const std::set<std::string_view> prims = {
                "int", "long", "short", "byte", "char", "boolean", "float", "double", "void"};
            if (!prims.count(toks[i].text)) return 0;
            *simple = std::string(toks[i].text);
            *simple_pos = i;
            ++i;
        } else if (toks[i].kind == JTok::ident) {
            *simple = std::string(toks[i].text);
            *simple_pos = i;
            ++i;
            while (i + 1 < end && tok_is(toks[i], ".") && toks[i + 1].kind == JTok::ident) {
                *simple = std::string(toks[i + 1].text);
                *simple_pos = i + 1;
                i += 2;
            }
        } else {
            return 0;
        }
        if (std::size_t g = match_generics(toks, i, end)) i = g;
        while (i + 1 < end && tok_is(toks[i], "[") && tok_is(toks[i + 1], "]")) i += 2;
        return i;
    }

    void emit_generic_type_uses(std::size_t from, std::size_t to) {
        for (std::size_t i = from; i < to; ++i) {
            const JavaToken& t = toks[i];
            if (t.kind == JTok::ident && starts_upper(t.text) && t.text != "extends" &&
                t.text != "super")
                hit(out.type_uses, t);
        }
    }

    // Declaration = Type name [',' name ...] with a terminator that rules
    // out plain expressions. Emits the type uses, registers locals, and
    // returns the index just past the declared name; 0 when not a decl.
    std::size_t match_declaration(std::size_t i) {
        std::string simple;
        std::size_t simple_pos = 0;
        std::size_t after_type = match_type(i, &simple, &simple_pos);
        if (after_type == 0 || after_type >= end) return 0;
        if (toks[after_type].kind != JTok::ident) return 0;
        std::size_t name_pos = after_type;
        std::size_t after_name = name_pos + 1;
        // allow C-style arrays: String names[]
        while (after_name + 1 < end && tok_is(toks[after_name], "[") &&
               tok_is(toks[after_name + 1], "]"))
            after_name += 2;
        if (after_name >= end) return 0;
        const JavaToken& term = toks[after_name];
        if (!(tok_is(term, "=") || tok_is(term, ";") || tok_is(term, ",") || tok_is(term, ":") ||
              tok_is(term, ")")))
            return 0;
        // the base type mention (skip the contextual `var`)
        if (toks[simple_pos].kind == JTok::ident && simple != "var")
            hit(out.type_uses, toks[simple_pos]);
        // capitalized identifiers inside the generic argument list
        emit_generic_type_uses(simple_pos + 1, name_pos);
        declare(toks[name_pos].text);
        return after_name;
    }

    // After '::' the member name itself carries no edge (arity unknown).
    void run(std::size_t begin) {
        std::size_t i = begin;
        std::string_view prev;  // text of previous significant token
        bool prev_keyword = false;
        bool in_decl_statement = false;
        while (i < end) {
            if (skip.count(i)) {
                prev = toks[i].text;
                prev_keyword = toks[i].kind == JTok::keyword;
                ++i;
                continue;
            }
            const JavaToken& t = toks[i];

            if (tok_is(t, "{")) {
                scopes.emplace_back();
                prev = t.text;
                prev_keyword = false;
                ++i;
                continue;
            }
            if (tok_is(t, "}")) {
                if (scopes.size() > 1) scopes.pop_back();
                prev = t.text;
                prev_keyword = false;
                ++i;
                continue;
            }
            if (tok_is(t, ";")) {
                in_decl_statement = false;
                prev = t.text;
                prev_keyword = false;
                ++i;
                continue;
            }
            if (tok_is(t, "@")) {
                // annotation: edge for the (last segment of the) type name
                std::size_t j = i + 1;
                const JavaToken* last = nullptr;
                while (j < end && toks[j].kind == JTok::ident) {
                    last = &toks[j];
                    ++j;
                    if (j < end && tok_is(toks[j], "."))
                        ++j;
                    else
                        break;
                }
                if (last && starts_upper(last->text)) hit(out.type_uses, *last);
                if (j < end && tok_is(toks[j], "(")) {
                    std::size_t close = j;
                    count_args(j, &close);
                    j = close + 1;
                }
                prev = "@";
                prev_keyword = false;
                i = j;
                continue;
            }

            bool decl_pos = prev.empty() || prev == ";" || prev == "{" || prev == "}" ||
                            prev == "(" || prev == ":" || prev == "->" ||
                            (prev_keyword && (prev == "final" || prev == "else" || prev == "do" ||
                                              prev == "try"));
            // declarations can start with a primitive keyword (int x = 1)
            static const std::set<std::string_view> prim_types = {
                "int", "long", "short", "byte", "char", "boolean", "float", "double"};
            if (decl_pos && t.kind == JTok::keyword && prim_types.count(t.text)) {
                if (std::size_t after = match_declaration(i)) {
                    in_decl_statement = true;
                    prev = toks[after - 1].text;
                    prev_keyword = false;
                    i = after;
                    continue;
                }
            }

            if (t.kind == JTok::keyword) {
                if (t.text == "new") {
                    std::string simple;
                    std::size_t pos = 0;
                    std::size_t after = match_type(i + 1, &simple, &pos);
                    if (after != 0 && toks[pos].kind == JTok::ident) {
                        hit(out.type_uses, toks[pos]);
                        emit_generic_type_uses(pos + 1, after);
                        for (std::size_t k = i + 1; k < after; ++k) skip.insert(k);
                    }
                    prev = t.text;
                    prev_keyword = true;
                    ++i;
                    continue;
                }
                if (t.text == "instanceof") {
                    std::size_t j = i + 1;
                    if (j < end && toks[j].kind == JTok::ident && toks[j].text == "final") ++j;
                    std::string simple;
                    std::size_t pos = 0;
                    std::size_t after = match_type(j, &simple, &pos);
                    if (after != 0) {
                        if (toks[pos].kind == JTok::ident) {
                            hit(out.type_uses, toks[pos]);
                            emit_generic_type_uses(pos + 1, after);
                        }
                        // pattern variable
                        if (after < end && toks[after].kind == JTok::ident) {
                            declare(toks[after].text);
                            ++after;
                        }
                        for (std::size_t k = i + 1; k < after; ++k) skip.insert(k);
                    }
                    prev = t.text;
                    prev_keyword = true;
                    ++i;
                    continue;
                }
                if (t.text == "this" || t.text == "super") {
                    if (i + 2 < end && tok_is(toks[i + 1], ".") && toks[i + 2].kind == JTok::ident) {
                        const JavaToken& member = toks[i + 2];
                        if (i + 3 < end && tok_is(toks[i + 3], "(")) {
                            hit(out.calls, member, count_args(i + 3, nullptr));
                        } else {
                            hit(out.field_reads, member);
                        }
                        skip.insert(i + 2);
                    } else if (i + 2 < end && tok_is(toks[i + 1], "::")) {
                        skip.insert(i + 2);  // method reference member: no edge
                    }
                    prev = t.text;
                    prev_keyword = true;
                    ++i;
                    continue;
                }
                prev = t.text;
                prev_keyword = true;
                ++i;
                continue;
            }

            if (tok_is(t, "(")) {
                // cast: (Type) operand
                std::string simple;
                std::size_t pos = 0;
                std::size_t after = match_type(i + 1, &simple, &pos);
                if (after != 0 && after < end && tok_is(toks[after], ")") && after > i + 1 &&
                    toks[pos].kind == JTok::ident && starts_upper(toks[pos].text) &&
                    after + 1 < end) {
                    const JavaToken& nxt = toks[after + 1];
                    bool operand = nxt.kind == JTok::ident || nxt.kind == JTok::number ||
                                   nxt.kind == JTok::string_lit || nxt.kind == JTok::char_lit ||
                                   tok_is(nxt, "(") ||
                                   (nxt.kind == JTok::keyword &&
                                    (nxt.text == "this" || nxt.text == "new" || nxt.text == "null"));
                    if (operand) {
                        hit(out.type_uses, toks[pos]);
                        emit_generic_type_uses(pos + 1, after);
                        for (std::size_t k = i + 1; k < after; ++k) skip.insert(k);
                        prev = ")";
                        prev_keyword = false;
                        i = after + 1;
                        continue;
                    }
                }
                // lambda parameter list: ( a, b ) ->
                std::size_t close = 0;
                count_args(i, &close);
                if (close + 1 < end && tok_is(toks[close + 1], "->")) {
                    // untyped single-ident groups become locals; typed groups
                    // are left for the declaration matcher
                    std::size_t j = i + 1;
                    while (j < close) {
                        if (toks[j].kind == JTok::ident &&
                            (tok_is(toks[j + 1], ",") || j + 1 == close)) {
                            declare(toks[j].text);
                            skip.insert(j);
                            j += 2;
                        } else {
                            // skip this comma group
                            int d = 0;
                            while (j < close) {
                                if (tok_is(toks[j], "(") || tok_is(toks[j], "[") ||
                                    tok_is(toks[j], "{"))
                                    ++d;
                                else if (tok_is(toks[j], ")") || tok_is(toks[j], "]") ||
                                         tok_is(toks[j], "}"))
                                    --d;
                                else if (tok_is(toks[j], ",") && d == 0) {
                                    ++j;
                                    break;
                                }
                                ++j;
                            }
                        }
                    }
                }
                prev = t.text;
                prev_keyword = false;
                ++i;
                continue;
            }

            if (t.kind == JTok::ident) {
                // single lambda parameter: x -> ...
                if (i + 1 < end && tok_is(toks[i + 1], "->") && !(prev_keyword && prev == "case")) {
                    declare(t.text);
                    prev = "->";
                    prev_keyword = false;
                    i += 2;
                    continue;
                }
                if (decl_pos) {
                    if (std::size_t after = match_declaration(i)) {
                        in_decl_statement = true;
                        prev = toks[after - 1].text;
                        prev_keyword = false;
                        i = after;
                        continue;
                    }
                }
                // further declarators of the same statement: `, b = 2`
                if (in_decl_statement && prev == "," && i + 1 < end &&
                    (tok_is(toks[i + 1], "=") || tok_is(toks[i + 1], ",") ||
                     tok_is(toks[i + 1], ";"))) {
                    declare(t.text);
                    prev = t.text;
                    prev_keyword = false;
                    ++i;
                    continue;
                }

                bool is_member = prev == ".";
                if (i + 1 < end && tok_is(toks[i + 1], "(")) {
                    hit(out.calls, t, count_args(i + 1, nullptr));
                } else if (i + 1 < end && tok_is(toks[i + 1], "::")) {
                    // method-reference qualifier; the referenced name gets no edge
                    if (all_caps(t.text))
                        hit(out.field_reads, t);
                    else if (starts_upper(t.text))
                        hit(out.type_uses, t);
                    else if (is_member)
                        hit(out.field_reads, t);
                    else if (!is_local(t.text))
                        hit(out.field_reads, t);
                    if (i + 2 < end &&
                        (toks[i + 2].kind == JTok::ident || toks[i + 2].text == "new"))
                        skip.insert(i + 2);
                } else if (is_member) {
                    if (starts_upper(t.text) && !all_caps(t.text))
                        hit(out.type_uses, t);
                    else
                        hit(out.field_reads, t);
                } else {
                    if (all_caps(t.text)) {
                        if (!is_local(t.text)) hit(out.field_reads, t);
                    } else if (starts_upper(t.text)) {
                        hit(out.type_uses, t);
                    } else if (!is_local(t.text)) {
                        hit(out.field_reads, t);
                    }
                }
                prev = t.text;
                prev_keyword = false;
                ++i;
                continue;
            }

            prev = t.text;
            prev_keyword = t.kind == JTok::keyword;
            ++i;
        }
    }
};

}  // namespace

BodyScan scan_java_statements(const std::vector<JavaToken>& toks, std::size_t begin,
                              std::size_t end, const std::vector<std::string>& seed_locals) {
    Scanner s{toks, std::min(end, toks.size()), {}, {}, {}};
    s.scopes.emplace_back();
    for (const auto& n : seed_locals) s.declare(n);

    int depth = 0;
    for (std::size_t i = begin; i < s.end; ++i) {
        if (tok_is(toks[i], "{")) ++depth;
        if (tok_is(toks[i], "}")) --depth;
        if (depth < 0) s.out.balanced = false;
    }
    if (depth != 0) s.out.balanced = false;

    s.run(begin);
    return std::move(s.out);
}

}  // namespace repofill
