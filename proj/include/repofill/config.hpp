#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "repofill/backend.hpp"
#include "repofill/embedding.hpp"
#include "repofill/essentials.hpp"
#include "repofill/index.hpp"
#include "repofill/metrics.hpp"
#include "repofill/miner.hpp"
#include "repofill/prompt.hpp"
#include "repofill/similarity.hpp"

namespace repofill {

/// Every knob a run can turn, fully resolved before any pipeline stage
/// executes. Values merge from three layers: built-in defaults, then the
/// optional JSON config file, then command-line flags. The environment
/// never overrides a setting — it only supplies secret values (the auth
/// token named by `backend.auth_env` / `embedding.auth_env` is read from
/// the environment at request time and exists nowhere in this struct).
///
/// The struct serializes verbatim (minus nothing — it holds no secrets)
/// into every completions file and metric report so a run can be
/// reproduced from its own output.
struct RunConfig {
    // pipeline
    std::string mode = "normal";         ///< "normal" | "oracle"
    std::string similarity = "lexical";  ///< lexical | semantic | hybrid
    std::size_t k_usages = 10;           ///< ranked usages kept per problem
    std::size_t k_signature = 5;         ///< signature-similar methods (L)
    std::size_t budget = 4096;           ///< generation prompt token budget
    std::size_t sketch_budget = 2048;    ///< draft prompt token budget
    int n_sketches = 1;                  ///< drafts requested (>1 warns, single draft kept)
    double min_name_sim = 0.5;           ///< essential-element match threshold
    double token_scale = 1.0;            ///< backend tokens per artifact token
    std::uint64_t seed = 0;              ///< miner sampling seed
    std::size_t workers = 0;             ///< worker pool size; 0 = logical cores
    std::string prompt_template_file;    ///< overrides the built-in generation template
    std::string sketch_template_file;    ///< overrides the built-in draft template
    std::string completion_marker;       ///< overrides the built-in body marker comment

    // mining
    std::size_t min_body_lines = 3;
    std::size_t context_lines = 50;

    // scoring
    std::string compile_hook;  ///< command template with {repo}; empty = no hook
    double compile_timeout_seconds = 300.0;

    // subsystems
    BackendConfig backend;
    EmbeddingConfig embedding;
    IndexConfig index;
};

/// Strict JSON image of the config: every field, stable key order
/// (alphabetical), no secrets. This is what reports embed.
nlohmann::json to_json(const RunConfig& cfg);

/// Inverse of to_json for a (possibly partial) JSON object: keys present
/// override `base`, absent keys keep their current value. Unknown keys are
/// rejected with std::runtime_error naming the key, so a typo cannot
/// silently fall back to a default.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});

/// Reads and merges a JSON config file over the defaults.
/// Throws std::runtime_error on unreadable files, parse errors, or
/// unknown keys.
RunConfig load_run_config(const std::filesystem::path& path);

/// Rejects unusable settings (unknown mode/similarity/backend kind,
/// zero budgets, non-positive token_scale, semantic similarity without an
/// embedding endpoint, ...) with std::invalid_argument listing the problem.
void validate(const RunConfig& cfg);

// Stage-config derivation: the single place RunConfig fans out to the
// per-module option structs. Template-file fields are resolved here (file
// contents replace the built-in text; unreadable files throw).
SketchConfig sketch_config(const RunConfig& cfg);
PromptConfig prompt_config(const RunConfig& cfg);
EeiConfig eei_config(const RunConfig& cfg);
MinerConfig miner_config(const RunConfig& cfg);
CompileHookConfig compile_config(const RunConfig& cfg);

/// Similarity settings; `provider` may be null for lexical mode.
SimilarityConfig similarity_config(const RunConfig& cfg, EmbeddingProvider* provider);

}  // namespace repofill
