#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "repofill/sketch.hpp"

namespace repofill {

/// Corpus-style BLEU-4 for one candidate/reference pair, scaled to [0,100].
///
/// Tokens come from tokenize_sequence (order and duplicates kept). For
/// n = 1..4, p_n is the clipped n-gram precision; when a precision has zero
/// matches it is smoothed to (matches+1)/(total+1), and orders with no
/// candidate n-grams at all contribute 1.0. The final score multiplies the
/// geometric mean of the four precisions by the brevity penalty
/// (1 if candidate length > reference length, else exp(1 - ref/cand)).
///
/// A token-empty candidate scores 0 against a non-empty reference; if both
/// sides are token-empty the pair scores 100 (they are identical after
/// tokenization, and exact_match must imply a perfect BLEU).
double bleu(std::string_view candidate, std::string_view reference);

/// One node of the statement tree used by the composite code metric. The
/// label is "<kind>:<shape>" (bare "<kind>" when the statement carries no
/// header tokens), where kind is one of
///   block, if, for, while, do, switch, synchronized, try, catch, finally,
///   case, default, else, empty, stmt
/// and shape is the statement's own header tokens (nested statements
/// excluded) normalized token-by-token: identifiers become `I`, number and
/// string and char literals become `L`, keywords and punctuation stay
/// verbatim, joined by single spaces.
struct StmtNode {
    std::string label;
    std::vector<StmtNode> children;
};

struct StmtTree {
    std::vector<StmtNode> roots;
    /// False when the lexer reported errors or braces were unbalanced; the
    /// composite metric then treats the tree-based components as
    /// uncomputable.
    bool parse_ok = false;
};

/// Tolerant statement-level parse of a method body. An outer brace pair
/// enclosing the whole token stream is stripped before parsing. Never
/// throws; malformed input yields parse_ok=false but still a best-effort
/// tree.
StmtTree parse_statement_tree(std::string_view body);

/// The multiset the AST-subtree component matches on: one S-expression per
/// node, each covering that node's full subtree, e.g.
/// "(if:( I ) (block (stmt:I ( ) ;)))".
std::vector<std::string> subtree_signatures(const StmtTree& tree);

/// The multiset the dataflow component matches on: one item per variable
/// use that is reachable from a definition. Definitions are identifiers
/// directly followed by a plain `=` and not preceded by `.`; they are
/// renamed v0, v1, ... in textual order (a reassignment gets a fresh
/// ordinal). Each later occurrence of the variable that is neither a
/// definition, a member access (preceded by `.`), nor a call (followed by
/// `(`) emits "use(vK)" for the latest preceding definition.
std::vector<std::string> dataflow_chains(std::string_view body);

/// Component breakdown of the composite code metric.
struct CodeBleuScore {
    double score = 0.0;           ///< [0,100]
    double ngram = 0.0;           ///< [0,1], plain BLEU component
    double weighted_ngram = 0.0;  ///< [0,1], keyword-weighted BLEU component
    std::optional<double> ast;        ///< [0,1]; absent when uncomputable
    std::optional<double> dataflow;   ///< [0,1]; absent when uncomputable
    bool degraded = false;  ///< a parse failure dropped tree components
};

/// Composite code similarity in [0,100]: the mean of four equally weighted
/// components — n-gram match (bleu/100), keyword-weighted n-gram match
/// (Java keywords weigh 4.0, other tokens 1.0), AST-subtree match (clipped
/// multiset precision of candidate subtree signatures against the
/// reference's), and dataflow match (clipped multiset precision of def-use
/// items). Components that cannot be computed are dropped and the weights
/// renormalized over the rest:
///   - either side fails to parse → AST and dataflow dropped, degraded=true;
///   - reference tree or def-use set empty → that component dropped silently
///     (a property of the pair, not a failure).
/// A parsable candidate with an empty tree or def-use set against a
/// non-empty reference scores 0 on that component. `frontend` names the
/// language frontend for the tree components; only "java" is supported, and
/// any other value drops the tree components (degraded=true).
CodeBleuScore codebleu(std::string_view candidate, std::string_view reference,
                       const std::string& frontend = "java");

/// Strict equality after normalizing line endings and stripping at most one
/// leading and one trailing blank line. Case, internal spacing and internal
/// blank lines all count.
bool exact_match(std::string_view candidate, std::string_view reference);

struct CompileHookConfig {
    /// Shell command template; every "{repo}" expands to the scratch copy's
    /// root. Empty → compile checking disabled.
    std::string hook_cmd;
    double timeout_seconds = 300.0;
};

struct CompileOutcome {
    /// Absent when no hook is configured, the hook timed out, or the
    /// scratch setup failed; `note` then says why.
    std::optional<bool> compiled;
    std::string note;
};

/// Splices `candidate_body` over the problem's body span inside a scratch
/// copy of the repository, runs the hook command with {repo} pointing at
/// the copy, and maps exit status 0 to true. Each call uses its own scratch
/// tree (safe to run concurrently) and removes it afterward. Hook output is
/// discarded so reports stay clean.
CompileOutcome compile_check(const MbcProblem& problem, std::string_view candidate_body,
                             const CompileHookConfig& cfg);

}  // namespace repofill
