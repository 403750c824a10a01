#include "repofill/metrics.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "repofill/java_lexer.hpp"
#include "repofill/text.hpp"

namespace repofill {

namespace {

// ---------------------------------------------------------------------------
// n-gram precision core, shared by the plain and keyword-weighted variants.
// ---------------------------------------------------------------------------

double token_weight_unit(const std::string&) { return 1.0; }

double token_weight_keyword(const std::string& tok) {
    return is_java_keyword(tok) ? 4.0 : 1.0;
}

// candidate n-grams as (joined key, mean token weight); the mean keeps the
// plain metric's smoothing denominator equal to the n-gram count
std::vector<std::pair<std::string, double>> ngrams(const std::vector<std::string>& toks, int n,
                                                   double (*weight)(const std::string&)) {
    std::vector<std::pair<std::string, double>> out;
    if (static_cast<int>(toks.size()) < n) return out;
    for (std::size_t k = 0; k + n <= toks.size(); ++k) {
        std::string key = toks[k];
        double w = weight(toks[k]);
        for (int d = 1; d < n; ++d) {
            key += '\x1f';
            key += toks[k + d];
            w += weight(toks[k + d]);
        }
        out.emplace_back(std::move(key), w / n);
    }
    return out;
}

double bleu_core(const std::vector<std::string>& cand, const std::vector<std::string>& ref,
                 double (*weight)(const std::string&)) {
    if (cand.empty() || ref.empty()) return (cand.empty() && ref.empty()) ? 100.0 : 0.0;
    double log_sum = 0.0;
    for (int n = 1; n <= 4; ++n) {
        auto cg = ngrams(cand, n, weight);
        double p = 1.0;  // orders longer than the candidate contribute 1.0
        if (!cg.empty()) {
            std::map<std::string, long> ref_count;
            for (const auto& [key, w] : ngrams(ref, n, weight)) ++ref_count[key];
            std::map<std::string, std::pair<long, double>> cand_count;  // count, weight
            for (const auto& [key, w] : cg) {
                auto& slot = cand_count[key];
                ++slot.first;
                slot.second = w;
            }
            double matched = 0.0, total = 0.0;
            for (const auto& [key, slot] : cand_count) {
                total += static_cast<double>(slot.first) * slot.second;
                auto it = ref_count.find(key);
                long clipped = std::min(slot.first, it == ref_count.end() ? 0L : it->second);
                matched += static_cast<double>(clipped) * slot.second;
            }
            p = matched > 0.0 ? matched / total : (matched + 1.0) / (total + 1.0);
        }
        log_sum += std::log(p);
    }
    double bp = cand.size() > ref.size()
                    ? 1.0
                    : std::exp(1.0 - static_cast<double>(ref.size()) /
                                         static_cast<double>(cand.size()));
    return bp * std::exp(log_sum / 4.0) * 100.0;
}

double clipped_precision(const std::vector<std::string>& cand,
                         const std::vector<std::string>& ref) {
    if (cand.empty()) return 0.0;
    std::map<std::string, long> budget;
    for (const auto& s : ref) ++budget[s];
    long matched = 0;
    for (const auto& s : cand) {
        auto it = budget.find(s);
        if (it != budget.end() && it->second > 0) {
            ++matched;
            --it->second;
        }
    }
    return static_cast<double>(matched) / static_cast<double>(cand.size());
}

// ---------------------------------------------------------------------------
// Statement-tree parser.
// ---------------------------------------------------------------------------

std::string norm_token(const JavaToken& t) {
    switch (t.kind) {
        case JTok::ident:
            return "I";
        case JTok::number:
        case JTok::string_lit:
        case JTok::char_lit:
            return "L";
        default:
            return std::string(t.text);
    }
}

class StmtParser {
public:
    explicit StmtParser(const std::vector<JavaToken>& toks) : toks_(toks) {}

    std::vector<StmtNode> parse_range(std::size_t& i, std::size_t end) {
        std::vector<StmtNode> out;
        while (i < end && !at_punct(i, "}")) out.push_back(parse_stmt(i, end));
        return out;
    }

private:
    const std::vector<JavaToken>& toks_;

    bool at_punct(std::size_t i, std::string_view p) const {
        return i < toks_.size() && toks_[i].kind == JTok::punct && toks_[i].text == p;
    }
    bool at_keyword(std::size_t i, std::string_view k) const {
        return i < toks_.size() && toks_[i].kind == JTok::keyword && toks_[i].text == k;
    }

    static std::string make_label(std::string_view kind, const std::vector<std::string>& shape) {
        std::string label(kind);
        if (!shape.empty()) {
            label += ':';
            for (std::size_t k = 0; k < shape.size(); ++k) {
                if (k > 0) label += ' ';
                label += shape[k];
            }
        }
        return label;
    }

    void consume_parens(std::size_t& i, std::size_t end, std::vector<std::string>& shape) {
        int depth = 0;
        while (i < end) {
            const JavaToken& t = toks_[i];
            shape.push_back(norm_token(t));
            ++i;
            if (t.kind != JTok::punct) continue;
            if (t.text == "(") ++depth;
            if (t.text == ")" && --depth <= 0) return;
        }
    }

    std::size_t matching_brace(std::size_t open, std::size_t end) const {
        int depth = 0;
        for (std::size_t j = open; j < end; ++j) {
            if (toks_[j].kind != JTok::punct) continue;
            if (toks_[j].text == "{") ++depth;
            if (toks_[j].text == "}" && --depth == 0) return j;
        }
        return end;
    }

    void parse_child_into(StmtNode& node, std::size_t& i, std::size_t end) {
        if (i < end && !at_punct(i, "}")) node.children.push_back(parse_stmt(i, end));
    }

    StmtNode parse_stmt(std::size_t& i, std::size_t end) {
        const JavaToken& t = toks_[i];
        if (t.kind == JTok::punct && t.text == "{") {
            std::size_t close = matching_brace(i, end);
            StmtNode node{"block", {}};
            std::size_t inner = i + 1;
            node.children = parse_range(inner, close);
            i = close < end ? close + 1 : end;
            return node;
        }
        if (t.kind == JTok::punct && t.text == ";") {
            ++i;
            return StmtNode{"empty", {}};
        }
        if (t.kind == JTok::keyword) {
            std::string_view kw = t.text;
            if (kw == "if") {
                ++i;
                std::vector<std::string> shape;
                if (at_punct(i, "(")) consume_parens(i, end, shape);
                StmtNode node{make_label("if", shape), {}};
                parse_child_into(node, i, end);
                if (at_keyword(i, "else")) {
                    ++i;
                    parse_child_into(node, i, end);
                }
                return node;
            }
            if (kw == "for" || kw == "while" || kw == "switch" || kw == "synchronized" ||
                kw == "catch") {
                ++i;
                std::vector<std::string> shape;
                if (at_punct(i, "(")) consume_parens(i, end, shape);
                StmtNode node{make_label(kw, shape), {}};
                parse_child_into(node, i, end);
                return node;
            }
            if (kw == "do") {
                ++i;
                StmtNode node{"do", {}};
                parse_child_into(node, i, end);
                std::vector<std::string> shape;
                if (at_keyword(i, "while")) {
                    ++i;
                    if (at_punct(i, "(")) consume_parens(i, end, shape);
                    if (at_punct(i, ";")) {
                        shape.push_back(";");
                        ++i;
                    }
                }
                node.label = make_label("do", shape);
                return node;
            }
            if (kw == "try") {
                ++i;
                std::vector<std::string> shape;
                if (at_punct(i, "(")) consume_parens(i, end, shape);  // try-with-resources
                StmtNode node{make_label("try", shape), {}};
                parse_child_into(node, i, end);
                while (at_keyword(i, "catch") || at_keyword(i, "finally")) {
                    if (at_keyword(i, "finally")) {
                        ++i;
                        StmtNode fin{"finally", {}};
                        parse_child_into(fin, i, end);
                        node.children.push_back(std::move(fin));
                    } else {
                        node.children.push_back(parse_stmt(i, end));
                    }
                }
                return node;
            }
            if (kw == "case" || kw == "default") {
                std::vector<std::string> shape;
                ++i;
                int pdepth = 0;
                while (i < end) {
                    const JavaToken& c = toks_[i];
                    shape.push_back(norm_token(c));
                    ++i;
                    if (c.kind != JTok::punct) continue;
                    if (c.text == "(") ++pdepth;
                    if (c.text == ")" && pdepth > 0) --pdepth;
                    if (pdepth == 0 && (c.text == ":" || c.text == "->")) break;
                }
                return StmtNode{make_label(kw, shape), {}};
            }
            if (kw == "finally" || kw == "else") {  // stray; keep structure
                ++i;
                StmtNode node{std::string(kw), {}};
                parse_child_into(node, i, end);
                return node;
            }
        }
        // Generic statement: everything up to and including ';' at the
        // statement's own nesting level. Nested braces (lambdas, anonymous
        // classes) stay inside the shape.
        std::vector<std::string> shape;
        int pdepth = 0, bdepth = 0;
        while (i < end) {
            const JavaToken& c = toks_[i];
            if (c.kind == JTok::punct && c.text == "}" && bdepth == 0) break;
            shape.push_back(norm_token(c));
            ++i;
            if (c.kind != JTok::punct) continue;
            if (c.text == "(") ++pdepth;
            if (c.text == ")" && pdepth > 0) --pdepth;
            if (c.text == "{") ++bdepth;
            if (c.text == "}" && bdepth > 0) --bdepth;
            if (c.text == ";" && pdepth == 0 && bdepth == 0) break;
        }
        return StmtNode{make_label("stmt", shape), {}};
    }
};

void collect_signatures(const StmtNode& node, std::vector<std::string>& out) {
    std::string sig = "(" + node.label;
    for (const StmtNode& c : node.children) {
        collect_signatures(c, out);  // appends the child's own subtree last
        sig += ' ';
        sig += out.back();
    }
    sig += ')';
    out.push_back(std::move(sig));
}

std::string shell_single_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += '\'';
    return out;
}

}  // namespace

double bleu(std::string_view candidate, std::string_view reference) {
    return bleu_core(tokenize_sequence(candidate), tokenize_sequence(reference),
                     token_weight_unit);
}

StmtTree parse_statement_tree(std::string_view body) {
    LexResult lex = lex_java(body);
    StmtTree tree;
    int depth = 0;
    bool balanced = true;
    for (const JavaToken& t : lex.tokens) {
        if (t.kind != JTok::punct) continue;
        if (t.text == "{") ++depth;
        if (t.text == "}" && --depth < 0) balanced = false;
    }
    balanced = balanced && depth == 0;
    tree.parse_ok = lex.error_count == 0 && balanced;

    std::size_t begin = 0, end = lex.tokens.size();
    if (end >= 2 && lex.tokens.front().kind == JTok::punct && lex.tokens.front().text == "{") {
        // strip an outer brace pair that encloses the whole body
        int d = 0;
        std::size_t close = end;
        for (std::size_t j = 0; j < end; ++j) {
            if (lex.tokens[j].kind != JTok::punct) continue;
            if (lex.tokens[j].text == "{") ++d;
            if (lex.tokens[j].text == "}" && --d == 0) {
                close = j;
                break;
            }
        }
        if (close == end - 1) {
            begin = 1;
            end = close;
        }
    }
    StmtParser parser(lex.tokens);
    std::size_t i = begin;
    tree.roots = parser.parse_range(i, end);
    return tree;
}

std::vector<std::string> subtree_signatures(const StmtTree& tree) {
    std::vector<std::string> out;
    for (const StmtNode& root : tree.roots) collect_signatures(root, out);
    return out;
}

std::vector<std::string> dataflow_chains(std::string_view body) {
    LexResult lex = lex_java(body);
    const auto& toks = lex.tokens;
    std::vector<std::string> items;
    std::map<std::string, int, std::less<>> latest_def;  // name -> ordinal
    int next_ordinal = 0;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (toks[i].kind != JTok::ident) continue;
        bool member = i > 0 && toks[i - 1].kind == JTok::punct && toks[i - 1].text == ".";
        bool assigned =
            i + 1 < toks.size() && toks[i + 1].kind == JTok::punct && toks[i + 1].text == "=";
        bool called =
            i + 1 < toks.size() && toks[i + 1].kind == JTok::punct && toks[i + 1].text == "(";
        if (assigned && !member) {
            latest_def[std::string(toks[i].text)] = next_ordinal++;
            continue;
        }
        if (member || called) continue;
        auto it = latest_def.find(toks[i].text);
        if (it != latest_def.end())
            items.push_back("use(v" + std::to_string(it->second) + ")");
    }
    return items;
}

CodeBleuScore codebleu(std::string_view candidate, std::string_view reference,
                       const std::string& frontend) {
    CodeBleuScore s;
    auto cand_toks = tokenize_sequence(candidate);
    auto ref_toks = tokenize_sequence(reference);
    s.ngram = bleu_core(cand_toks, ref_toks, token_weight_unit) / 100.0;
    s.weighted_ngram = bleu_core(cand_toks, ref_toks, token_weight_keyword) / 100.0;

    bool trees_ok = frontend == "java";
    StmtTree cand_tree, ref_tree;
    if (trees_ok) {
        cand_tree = parse_statement_tree(candidate);
        ref_tree = parse_statement_tree(reference);
        trees_ok = cand_tree.parse_ok && ref_tree.parse_ok;
    }
    if (!trees_ok) {
        s.degraded = true;
    } else {
        auto ref_sigs = subtree_signatures(ref_tree);
        if (!ref_sigs.empty())
            s.ast = clipped_precision(subtree_signatures(cand_tree), ref_sigs);
        auto ref_flow = dataflow_chains(reference);
        if (!ref_flow.empty())
            s.dataflow = clipped_precision(dataflow_chains(candidate), ref_flow);
    }

    double sum = s.ngram + s.weighted_ngram;
    int parts = 2;
    if (s.ast) {
        sum += *s.ast;
        ++parts;
    }
    if (s.dataflow) {
        sum += *s.dataflow;
        ++parts;
    }
    s.score = 100.0 * sum / parts;
    return s;
}

bool exact_match(std::string_view candidate, std::string_view reference) {
    auto normalize = [](std::string_view raw) {
        std::string text = normalize_newlines(raw);
        std::vector<std::string_view> lines;
        std::string_view view = text;
        std::size_t start = 0;
        while (true) {
            std::size_t nl = view.find('\n', start);
            if (nl == std::string_view::npos) {
                lines.push_back(view.substr(start));
                break;
            }
            lines.push_back(view.substr(start, nl - start));
            start = nl + 1;
        }
        std::size_t lo = 0, hi = lines.size();
        if (hi - lo > 1 && is_blank_line(lines[lo])) ++lo;
        if (hi - lo > 1 && is_blank_line(lines[hi - 1])) --hi;
        std::string out;
        for (std::size_t k = lo; k < hi; ++k) {
            if (k > lo) out += '\n';
            out += lines[k];
        }
        return out;
    };
    return normalize(candidate) == normalize(reference);
}

CompileOutcome compile_check(const MbcProblem& problem, std::string_view candidate_body,
                             const CompileHookConfig& cfg) {
    namespace fs = std::filesystem;
    if (cfg.hook_cmd.empty()) return {std::nullopt, "no compile hook configured"};
    std::error_code ec;
    if (problem.repo_root.empty() || !fs::is_directory(problem.repo_root, ec))
        return {std::nullopt, "repository root unavailable: " + problem.repo_root};

    static std::atomic<unsigned long> counter{0};
    fs::path scratch = fs::temp_directory_path() /
                       ("repofill-compile-" + std::to_string(::getpid()) + "-" +
                        std::to_string(counter.fetch_add(1)));
    struct Cleanup {
        const fs::path& dir;
        ~Cleanup() {
            std::error_code ignored;
            std::filesystem::remove_all(dir, ignored);
        }
    } cleanup{scratch};

    fs::copy(problem.repo_root, scratch, fs::copy_options::recursive, ec);
    if (ec) return {std::nullopt, "scratch copy failed: " + ec.message()};

    fs::path target = scratch / problem.file_path;
    std::string content;
    {
        std::ifstream in(target, std::ios::binary);
        if (!in) return {std::nullopt, "target file unreadable: " + problem.file_path};
        std::ostringstream buf;
        buf << in.rdbuf();
        content = buf.str();
    }
    const SourceSpan& span = problem.body_start;
    if (span.start_byte > span.end_byte || span.end_byte > content.size())
        return {std::nullopt, "body span out of range for " + problem.file_path};
    content = content.substr(0, span.start_byte) + std::string(candidate_body) +
              content.substr(span.end_byte);
    {
        std::ofstream out(target, std::ios::binary | std::ios::trunc);
        if (!out) return {std::nullopt, "target file unwritable: " + problem.file_path};
        out << content;
    }

    std::string cmd = render_template(cfg.hook_cmd, {{"repo", scratch.string()}});
    char secs[32];
    std::snprintf(secs, sizeof secs, "%g", cfg.timeout_seconds);
    std::string full =
        "timeout " + std::string(secs) + "s sh -c " + shell_single_quote(cmd) + " >/dev/null 2>&1";
    int rc = std::system(full.c_str());
    if (rc == -1) return {std::nullopt, "failed to launch compile hook"};
    if (!WIFEXITED(rc)) return {std::nullopt, "compile hook terminated abnormally"};
    int status = WEXITSTATUS(rc);
    if (status == 124) return {std::nullopt, "compile hook timed out"};
    return {status == 0, ""};
}

}  // namespace repofill
