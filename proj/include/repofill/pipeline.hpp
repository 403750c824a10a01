#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "repofill/config.hpp"
#include "repofill/miner.hpp"
#include "repofill/sketch.hpp"

namespace repofill {

/// Stable identity for joining completions back to problems:
/// "<repo-relative path>:<body start line>".
std::string problem_id(const MbcProblem& problem);

/// What each retrieval stage produced for one problem. Everything here is
/// deterministic for a fixed index + config + backend, so it is serialized
/// with the completion; wall-clock timings are kept out (they go to stdout
/// via ProblemResult) so rerunning a run reproduces its files byte for byte.
struct StageTrace {
    std::vector<std::string> signature_similar;   ///< L, most similar first
    std::vector<std::string> essential_elements;  ///< "method:"/"field:"/"class:" + qualified name
    struct UsageRow {
        std::string qualified_name;
        double score = 0.0;
        std::vector<std::string> via_elements;
    };
    std::vector<UsageRow> usages;  ///< ranked, best first
    std::size_t prompt_tokens = 0;
    bool prompt_truncated = false;
    bool sketch_ok = false;
    bool analysis_degraded = false;
    bool ranking_degraded = false;
};

struct ProblemResult {
    std::string id;
    std::string body;  ///< extracted completion; "" when extraction or the run failed
    bool extraction_ok = false;
    bool failed = false;  ///< pipeline error on this problem (backend outage, bad data)
    std::string error;    ///< sanitized message when failed
    StageTrace trace;
    // stdout diagnostics only — never serialized:
    double retrieval_seconds = 0.0;  ///< L + essentials + usages + ranking
    double total_seconds = 0.0;
};

struct CompletionRun {
    std::vector<ProblemResult> results;  ///< problem order, independent of worker schedule
    std::size_t failures = 0;
    RunConfig config;
    std::string snapshot_id;
};

/// Full pipeline for one problem: signature-similar retrieval → sketch
/// (oracle mode substitutes the reference body) → analysis → essential
/// elements → usage ranking → prompt → backend → body extraction.
/// Per-problem errors are captured in the result, not thrown; only
/// configuration errors (e.g. an unreadable template file) propagate.
ProblemResult complete_problem(const RepositoryIndex& index, const MbcProblem& problem,
                               Backend& backend, const RunConfig& cfg,
                               EmbeddingProvider* provider = nullptr);

/// complete_problem over every problem on a worker pool (cfg.workers, 0 =
/// logical cores). Results land at their problem's position; assembly is
/// single-threaded after the pool drains.
CompletionRun run_completion(const RepositoryIndex& index,
                             const std::vector<MbcProblem>& problems, Backend& backend,
                             const RunConfig& cfg, EmbeddingProvider* provider = nullptr);

/// Line-delimited persistence: a header record {config, snapshot_id}
/// followed by one record per result. Deterministic bytes for a
/// deterministic run.
void save_completions(const CompletionRun& run, const std::filesystem::path& path);

struct LoadedCompletions {
    nlohmann::json config;  ///< header RunConfig exactly as written
    std::string snapshot_id;
    std::vector<std::pair<std::string, std::string>> bodies;  ///< (id, body), file order
};

/// Reads a completions file back for scoring. Throws std::runtime_error on
/// missing/malformed header or records, or duplicate ids.
LoadedCompletions load_completions(const std::filesystem::path& path);

struct MetricRow {
    std::string id;
    double bleu = 0.0;
    double codebleu = 0.0;
    bool codebleu_degraded = false;
    bool exact_match = false;
    std::optional<bool> compile_ok;  ///< absent: no hook, or hook timed out
    std::string compile_note;        ///< reason when compile_ok is absent
};

struct MetricReport {
    std::vector<MetricRow> rows;  ///< manifest problem order, one per problem
    // Aggregates, always recomputable from rows:
    double bleu_mean = 0.0;
    double codebleu_mean = 0.0;
    double exact_match_rate = 0.0;                    ///< fraction of rows
    std::optional<double> compile_rate;               ///< over rows with a verdict
    std::string mode;                                 ///< completion run's normal/oracle
    nlohmann::json config_snapshot;                   ///< eval-time RunConfig
    std::string snapshot_id;                          ///< index identity from the completions
    std::vector<std::string> unmatched_completion_ids;  ///< ids with no manifest problem
};

/// Joins completions to manifest problems by id and scores every problem;
/// a problem with no completion scores as an empty candidate. Completion
/// ids that match nothing are collected (callers treat any as a failure).
/// Rows are computed concurrently (cfg.workers), aggregated single-threaded.
MetricReport evaluate_completions(const BenchmarkManifest& manifest,
                                  const LoadedCompletions& completions, const RunConfig& cfg);

/// Structured report file (JSON, deterministic key order).
void save_report(const MetricReport& report, const std::filesystem::path& path);

/// Human-readable per-problem table plus the aggregate line, for stdout.
std::string render_report_table(const MetricReport& report);

}  // namespace repofill
