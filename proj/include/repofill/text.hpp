#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace repofill {

/// Bag of lowercase subword tokens (deduplicated, sorted) plus the
/// pre-dedup token count.
struct TokenBag {
    std::vector<std::string> tokens;  // sorted, unique, lowercase
    std::size_t source_len = 0;       // token count before dedup

    bool contains(std::string_view t) const;
    bool empty() const { return tokens.empty(); }
};

/// Splits identifiers and free text into lowercase subwords.
///
/// Rules: non-alphanumeric characters separate words; within a word,
/// splits happen at camelCase boundaries (lower->Upper and the last
/// upper of an UPPERCase run), at underscore positions, and at
/// letter<->digit transitions. Everything is lowercased.
std::vector<std::string> tokenize_sequence(std::string_view text);

/// tokenize_sequence + dedup into a TokenBag.
TokenBag tokenize(std::string_view text);

/// |a ∩ b| / |a ∪ b|; 1.0 when both bags are empty.
double jaccard(const TokenBag& a, const TokenBag& b);

/// Counts tokens of `text` in sequence mode (the unit used for prompt
/// budgets and BLEU).
std::size_t token_count(std::string_view text);

// --- small shared helpers -------------------------------------------------

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Lowercase hex rendering of a 64-bit value (16 chars).
std::string to_hex(std::uint64_t v);

/// Normalizes \r\n and \r line endings to \n.
std::string normalize_newlines(std::string_view text);

/// True if `line` contains only whitespace.
bool is_blank_line(std::string_view line);

/// Splits on '\n' (no terminators kept). "a\nb\n" -> {"a","b",""}.
std::vector<std::string_view> split_lines(std::string_view text);

/// Glob match with `*` (within a path segment), `**` (across segments)
/// and `?`. Patterns without '/' are matched against the basename.
bool glob_match(std::string_view pattern, std::string_view path);

/// Replaces every `{key}` placeholder found in `slots`; text in braces that
/// names no slot is kept verbatim.
std::string render_template(std::string_view tmpl,
                            const std::vector<std::pair<std::string, std::string>>& slots);

}  // namespace repofill
