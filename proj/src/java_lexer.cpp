#include "repofill/java_lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <unordered_set>

namespace repofill {

namespace {

bool ident_start(unsigned char c) {
    return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}
bool ident_part(unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '$' || c >= 0x80;
}

// Longest-match operator table; order matters only within equal prefixes,
// so sort by length descending at lookup time instead: we just test the
// longest candidates first.
const std::array<std::string_view, 38> kOperators = {
    ">>>=", "<<=", ">>=", ">>>", "...", "->",  "::", "==", "!=", "<=",
    ">=",   "&&",  "||",  "++",  "--",  "+=",  "-=", "*=", "/=", "%=",
    "&=",   "|=",  "^=",  "<<",  ">>",  "+",   "-",  "*",  "/",  "%",
    "=",    "<",   ">",   "!",   "&",   "|",   "^",  "~",
};

}  // namespace

bool is_java_keyword(std::string_view word) {
    static const std::unordered_set<std::string_view> kw = {
        "abstract", "assert",   "boolean",  "break",      "byte",    "case",
        "catch",    "char",     "class",    "const",      "continue", "default",
        "do",       "double",   "else",     "enum",       "extends", "final",
        "finally",  "float",    "for",      "goto",       "if",      "implements",
        "import",   "instanceof", "int",    "interface",  "long",    "native",
        "new",      "package",  "private",  "protected",  "public",  "return",
        "short",    "static",   "strictfp", "super",      "switch",  "synchronized",
        "this",     "throw",    "throws",   "transient",  "try",     "void",
        "volatile", "while",    "true",     "false",      "null",
    };
    return kw.count(word) != 0;
}

LexResult lex_java(std::string_view src) {
    LexResult res;
    std::size_t i = 0;
    int line = 1;
    auto push = [&](JTok kind, std::size_t start, std::size_t end) {
        res.tokens.push_back({kind, src.substr(start, end - start), start, line});
    };

    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        // comments
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
            std::size_t j = i + 2;
            bool closed = false;
            while (j < src.size()) {
                if (src[j] == '\n') ++line;
                if (src[j] == '*' && j + 1 < src.size() && src[j + 1] == '/') {
                    closed = true;
                    j += 2;
                    break;
                }
                ++j;
            }
            if (!closed) {
                ++res.error_count;
                j = src.size();
            }
            i = j;
            continue;
        }
        // text blocks and strings
        if (c == '"') {
            std::size_t start = i;
            int start_line = line;
            if (i + 2 < src.size() && src[i + 1] == '"' && src[i + 2] == '"') {
                std::size_t j = i + 3;
                bool closed = false;
                while (j < src.size()) {
                    if (src[j] == '\n') ++line;
                    if (src[j] == '\\') {
                        j += 2;
                        continue;
                    }
                    if (src[j] == '"' && j + 2 < src.size() && src[j + 1] == '"' &&
                        src[j + 2] == '"') {
                        closed = true;
                        j += 3;
                        break;
                    }
                    ++j;
                }
                if (!closed) {
                    ++res.error_count;
                    j = src.size();
                }
                res.tokens.push_back({JTok::string_lit, src.substr(start, j - start), start, start_line});
                i = j;
                continue;
            }
            std::size_t j = i + 1;
            bool closed = false;
            while (j < src.size() && src[j] != '\n') {
                if (src[j] == '\\') {
                    j += 2;
                    continue;
                }
                if (src[j] == '"') {
                    closed = true;
                    ++j;
                    break;
                }
                ++j;
            }
            if (!closed) ++res.error_count;
            res.tokens.push_back({JTok::string_lit, src.substr(start, j - start), start, start_line});
            i = j;
            continue;
        }
        if (c == '\'') {
            std::size_t start = i;
            std::size_t j = i + 1;
            bool closed = false;
            while (j < src.size() && src[j] != '\n') {
                if (src[j] == '\\') {
                    j += 2;
                    continue;
                }
                if (src[j] == '\'') {
                    closed = true;
                    ++j;
                    break;
                }
                ++j;
            }
            if (!closed) ++res.error_count;
            push(JTok::char_lit, start, j);
            i = j;
            continue;
        }
        // numbers (also ".5" style)
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i;
            bool hex = false;
            if (src[j] == '0' && j + 1 < src.size() && (src[j + 1] == 'x' || src[j + 1] == 'X')) {
                hex = true;
                j += 2;
            }
            while (j < src.size()) {
                char d = src[j];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_') {
                    ++j;
                    continue;
                }
                if (d == '.' && j + 1 < src.size() &&
                    (std::isdigit(static_cast<unsigned char>(src[j + 1])) ||
                     (hex && std::isxdigit(static_cast<unsigned char>(src[j + 1]))))) {
                    ++j;
                    continue;
                }
                if ((d == '+' || d == '-') && j > i) {
                    char prev = src[j - 1];
                    if (prev == 'e' || prev == 'E' || prev == 'p' || prev == 'P') {
                        if (!hex || prev == 'p' || prev == 'P') {
                            ++j;
                            continue;
                        }
                    }
                }
                break;
            }
            push(JTok::number, i, j);
            i = j;
            continue;
        }
        if (ident_start(static_cast<unsigned char>(c))) {
            std::size_t j = i + 1;
            while (j < src.size() && ident_part(static_cast<unsigned char>(src[j]))) ++j;
            std::string_view word = src.substr(i, j - i);
            push(is_java_keyword(word) ? JTok::keyword : JTok::ident, i, j);
            i = j;
            continue;
        }
        // multi-char operators, longest first
        bool matched = false;
        for (std::string_view op : kOperators) {
            if (op.size() > 1 && src.substr(i).starts_with(op)) {
                push(JTok::punct, i, i + op.size());
                i += op.size();
                matched = true;
                break;
            }
        }
        if (matched) continue;
        push(JTok::punct, i, i + 1);
        ++i;
    }
    return res;
}

}  // namespace repofill
