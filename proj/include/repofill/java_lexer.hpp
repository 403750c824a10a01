#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace repofill {

enum class JTok {
    ident,       // identifiers and contextual keywords (var, record, yield, ...)
    keyword,     // reserved words incl. true/false/null
    number,      // all numeric literal forms
    string_lit,  // "..." and text blocks
    char_lit,    // '...'
    punct,       // operators and separators, longest-match
};

struct JavaToken {
    JTok kind = JTok::punct;
    std::string_view text;  // view into the lexed source
    std::size_t byte = 0;   // offset of first char
    int line = 1;           // 1-based
};

struct LexResult {
    std::vector<JavaToken> tokens;  // comments and whitespace dropped
    int error_count = 0;            // unterminated literals/comments
};

/// Tolerant Java lexer: never throws, flags malformed literals in
/// error_count and keeps going.
LexResult lex_java(std::string_view source);

/// Reserved Java keywords plus true/false/null.
bool is_java_keyword(std::string_view word);

}  // namespace repofill
