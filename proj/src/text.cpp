#include "repofill/text.hpp"

#include <algorithm>
#include <cctype>

namespace repofill {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_lower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

// Splits one alphanumeric run at camelCase and letter<->digit boundaries.
void split_word(std::string_view word, std::vector<std::string>& out) {
    std::string current;
    for (std::size_t i = 0; i < word.size(); ++i) {
        char c = word[i];
        bool boundary = false;
        if (!current.empty()) {
            char prev = word[i - 1];
            if (is_lower(prev) && is_upper(c)) {
                boundary = true;  // camelCase
            } else if (is_upper(prev) && is_upper(c) && i + 1 < word.size() &&
                       is_lower(word[i + 1])) {
                boundary = true;  // XMLHttp -> XML | Http
            } else if (is_digit(prev) != is_digit(c)) {
                boundary = true;  // letter<->digit
            }
        }
        if (boundary) {
            out.push_back(current);
            current.clear();
        }
        current += lower(c);
    }
    if (!current.empty()) out.push_back(current);
}

}  // namespace

bool TokenBag::contains(std::string_view t) const {
    return std::binary_search(tokens.begin(), tokens.end(), t);
}

std::vector<std::string> tokenize_sequence(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_alnum(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_alnum(text[j])) ++j;
        split_word(text.substr(i, j - i), out);
        i = j;
    }
    return out;
}

TokenBag tokenize(std::string_view text) {
    TokenBag bag;
    auto seq = tokenize_sequence(text);
    bag.source_len = seq.size();
    std::sort(seq.begin(), seq.end());
    seq.erase(std::unique(seq.begin(), seq.end()), seq.end());
    bag.tokens = std::move(seq);
    return bag;
}

double jaccard(const TokenBag& a, const TokenBag& b) {
    if (a.tokens.empty() && b.tokens.empty()) return 1.0;
    std::size_t inter = 0;
    std::size_t i = 0, j = 0;
    while (i < a.tokens.size() && j < b.tokens.size()) {
        int cmp = a.tokens[i].compare(b.tokens[j]);
        if (cmp == 0) {
            ++inter;
            ++i;
            ++j;
        } else if (cmp < 0) {
            ++i;
        } else {
            ++j;
        }
    }
    std::size_t uni = a.tokens.size() + b.tokens.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::size_t token_count(std::string_view text) { return tokenize_sequence(text).size(); }

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return s;
}

std::string normalize_newlines(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\r') {
            out += '\n';
            if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        } else {
            out += text[i];
        }
    }
    return out;
}

bool is_blank_line(std::string_view line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\n') {
            lines.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    lines.push_back(text.substr(start));
    return lines;
}

namespace {

// Recursive segment-aware glob.  `pattern` and `path` are both viewed as
// plain character sequences; '*' stops at '/', "**" does not.
bool glob_rec(std::string_view pat, std::string_view s) {
    std::size_t p = 0, i = 0;
    while (p < pat.size()) {
        char pc = pat[p];
        if (pc == '*') {
            bool dstar = p + 1 < pat.size() && pat[p + 1] == '*';
            std::size_t skip = dstar ? 2 : 1;
            // collapse "**/" so it can also match zero segments
            std::string_view rest = pat.substr(p + skip);
            if (dstar && !rest.empty() && rest.front() == '/') {
                if (glob_rec(rest.substr(1), s)) return true;
            }
            for (std::size_t k = i; k <= s.size(); ++k) {
                if (glob_rec(rest, s.substr(k))) return true;
                if (k < s.size() && !dstar && s[k] == '/') break;
            }
            return false;
        }
        if (i >= s.size()) return false;
        if (pc == '?') {
            if (s[i] == '/') return false;
        } else if (pc != s[i]) {
            return false;
        }
        ++p;
        ++i;
    }
    return i == s.size();
}

}  // namespace

bool glob_match(std::string_view pattern, std::string_view path) {
    if (pattern.find('/') == std::string_view::npos) {
        auto slash = path.rfind('/');
        std::string_view base = slash == std::string_view::npos ? path : path.substr(slash + 1);
        return glob_rec(pattern, base);
    }
    return glob_rec(pattern, path);
}

std::string render_template(std::string_view tmpl,
                            const std::vector<std::pair<std::string, std::string>>& slots) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            auto close = tmpl.find('}', i + 1);
            if (close != std::string_view::npos) {
                std::string_view key = tmpl.substr(i + 1, close - i - 1);
                auto hit = std::find_if(slots.begin(), slots.end(),
                                        [&](const auto& kv) { return kv.first == key; });
                if (hit != slots.end()) {
                    out += hit->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += tmpl[i++];
    }
    return out;
}

}  // namespace repofill
