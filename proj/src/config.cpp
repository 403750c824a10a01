#include "repofill/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace repofill {
namespace {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(std::string(what) + " not readable: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Applies `j[key]` onto `field` when present; type errors surface as
/// nlohmann exceptions naming the offending key via the caller's context.
template <typename T>
void take(const json& j, const char* key, T& field) {
    if (auto it = j.find(key); it != j.end()) field = it->get<T>();
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& scope) {
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key))
            throw std::runtime_error("unknown config key: " + scope + key);
    }
}

void merge_backend(const json& j, BackendConfig& b) {
    reject_unknown_keys(j,
                        {"kind", "endpoint", "model", "auth_env", "timeout_seconds", "temperature",
                         "max_output_tokens", "retries", "backoff_base_ms", "parallelism",
                         "canned_file"},
                        "backend.");
    take(j, "kind", b.kind);
    take(j, "endpoint", b.endpoint);
    take(j, "model", b.model);
    take(j, "auth_env", b.auth_env);
    take(j, "timeout_seconds", b.timeout_seconds);
    take(j, "temperature", b.temperature);
    take(j, "max_output_tokens", b.max_output_tokens);
    take(j, "retries", b.retries);
    take(j, "backoff_base_ms", b.backoff_base_ms);
    take(j, "parallelism", b.parallelism);
    take(j, "canned_file", b.canned_file);
}

void merge_embedding(const json& j, EmbeddingConfig& e) {
    reject_unknown_keys(
        j, {"endpoint", "model", "auth_env", "timeout_seconds", "batch_size", "parallelism"},
        "embedding.");
    take(j, "endpoint", e.endpoint);
    take(j, "model", e.model);
    take(j, "auth_env", e.auth_env);
    take(j, "timeout_seconds", e.timeout_seconds);
    take(j, "batch_size", e.batch_size);
    take(j, "parallelism", e.parallelism);
}

void merge_index(const json& j, IndexConfig& ix) {
    reject_unknown_keys(j, {"frontend", "include_globs", "exclude_globs", "test_globs"}, "index.");
    take(j, "frontend", ix.frontend);
    take(j, "include_globs", ix.include_globs);
    take(j, "exclude_globs", ix.exclude_globs);
    take(j, "test_globs", ix.test_globs);
}

}  // namespace

json to_json(const RunConfig& cfg) {
    return json{
        {"mode", cfg.mode},
        {"similarity", cfg.similarity},
        {"k_usages", cfg.k_usages},
        {"k_signature", cfg.k_signature},
        {"budget", cfg.budget},
        {"sketch_budget", cfg.sketch_budget},
        {"n_sketches", cfg.n_sketches},
        {"min_name_sim", cfg.min_name_sim},
        {"token_scale", cfg.token_scale},
        {"seed", cfg.seed},
        {"workers", cfg.workers},
        {"prompt_template_file", cfg.prompt_template_file},
        {"sketch_template_file", cfg.sketch_template_file},
        {"completion_marker", cfg.completion_marker},
        {"min_body_lines", cfg.min_body_lines},
        {"context_lines", cfg.context_lines},
        {"compile_hook", cfg.compile_hook},
        {"compile_timeout_seconds", cfg.compile_timeout_seconds},
        {"backend",
         {{"kind", cfg.backend.kind},
          {"endpoint", cfg.backend.endpoint},
          {"model", cfg.backend.model},
          {"auth_env", cfg.backend.auth_env},
          {"timeout_seconds", cfg.backend.timeout_seconds},
          {"temperature", cfg.backend.temperature},
          {"max_output_tokens", cfg.backend.max_output_tokens},
          {"retries", cfg.backend.retries},
          {"backoff_base_ms", cfg.backend.backoff_base_ms},
          {"parallelism", cfg.backend.parallelism},
          {"canned_file", cfg.backend.canned_file}}},
        {"embedding",
         {{"endpoint", cfg.embedding.endpoint},
          {"model", cfg.embedding.model},
          {"auth_env", cfg.embedding.auth_env},
          {"timeout_seconds", cfg.embedding.timeout_seconds},
          {"batch_size", cfg.embedding.batch_size},
          {"parallelism", cfg.embedding.parallelism}}},
        {"index",
         {{"frontend", cfg.index.frontend},
          {"include_globs", cfg.index.include_globs},
          {"exclude_globs", cfg.index.exclude_globs},
          {"test_globs", cfg.index.test_globs}}},
    };
}

RunConfig config_from_json(const json& j, RunConfig base) {
    if (!j.is_object()) throw std::runtime_error("config root must be a JSON object");
    reject_unknown_keys(j,
                        {"mode",
                         "similarity",
                         "k_usages",
                         "k_signature",
                         "budget",
                         "sketch_budget",
                         "n_sketches",
                         "min_name_sim",
                         "token_scale",
                         "seed",
                         "workers",
                         "prompt_template_file",
                         "sketch_template_file",
                         "completion_marker",
                         "min_body_lines",
                         "context_lines",
                         "compile_hook",
                         "compile_timeout_seconds",
                         "backend",
                         "embedding",
                         "index"},
                        "");
    take(j, "mode", base.mode);
    take(j, "similarity", base.similarity);
    take(j, "k_usages", base.k_usages);
    take(j, "k_signature", base.k_signature);
    take(j, "budget", base.budget);
    take(j, "sketch_budget", base.sketch_budget);
    take(j, "n_sketches", base.n_sketches);
    take(j, "min_name_sim", base.min_name_sim);
    take(j, "token_scale", base.token_scale);
    take(j, "seed", base.seed);
    take(j, "workers", base.workers);
    take(j, "prompt_template_file", base.prompt_template_file);
    take(j, "sketch_template_file", base.sketch_template_file);
    take(j, "completion_marker", base.completion_marker);
    take(j, "min_body_lines", base.min_body_lines);
    take(j, "context_lines", base.context_lines);
    take(j, "compile_hook", base.compile_hook);
    take(j, "compile_timeout_seconds", base.compile_timeout_seconds);
    if (auto it = j.find("backend"); it != j.end()) merge_backend(*it, base.backend);
    if (auto it = j.find("embedding"); it != j.end()) merge_embedding(*it, base.embedding);
    if (auto it = j.find("index"); it != j.end()) merge_index(*it, base.index);
    return base;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    const std::string text = read_text_file(path, "config file");
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error("config file " + path.string() + ": " + e.what());
    }
    try {
        return config_from_json(j);
    } catch (const json::exception& e) {
        throw std::runtime_error("config file " + path.string() + ": " + e.what());
    }
}

void validate(const RunConfig& cfg) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
    if (cfg.mode != "normal" && cfg.mode != "oracle")
        fail("mode must be \"normal\" or \"oracle\", got \"" + cfg.mode + "\"");
    try {
        parse_sim_mode(cfg.similarity);
    } catch (const std::exception&) {
        fail("similarity must be lexical, semantic, or hybrid, got \"" + cfg.similarity + "\"");
    }
    if (cfg.budget == 0) fail("budget must be positive");
    if (cfg.sketch_budget == 0) fail("sketch_budget must be positive");
    if (cfg.n_sketches < 1) fail("n_sketches must be at least 1");
    if (cfg.token_scale <= 0.0) fail("token_scale must be positive");
    if (cfg.min_name_sim < 0.0 || cfg.min_name_sim > 1.0) fail("min_name_sim must be in [0,1]");
    if (cfg.min_body_lines == 0) fail("min_body_lines must be positive");
    if (cfg.compile_timeout_seconds <= 0.0) fail("compile_timeout_seconds must be positive");
    if (cfg.backend.kind != "mock" && cfg.backend.kind != "http")
        fail("backend.kind must be \"mock\" or \"http\", got \"" + cfg.backend.kind + "\"");
    if (cfg.backend.kind == "http" && cfg.backend.endpoint.empty())
        fail("backend.kind \"http\" requires backend.endpoint");
    if (cfg.backend.kind == "http" && cfg.backend.model.empty())
        fail("backend.kind \"http\" requires backend.model");
    if (cfg.backend.retries < 0) fail("backend.retries must be non-negative");
    if (cfg.backend.parallelism < 1) fail("backend.parallelism must be at least 1");
    if (cfg.similarity != "lexical" && cfg.embedding.endpoint.empty())
        fail("similarity \"" + cfg.similarity + "\" requires embedding.endpoint");
    if (cfg.embedding.batch_size < 1) fail("embedding.batch_size must be at least 1");
    if (cfg.embedding.parallelism < 1) fail("embedding.parallelism must be at least 1");
    try {
        frontend_by_name(cfg.index.frontend);
    } catch (const std::exception&) {
        fail("unknown index.frontend \"" + cfg.index.frontend + "\"");
    }
}

SketchConfig sketch_config(const RunConfig& cfg) {
    SketchConfig s;
    s.k_signature = cfg.k_signature;
    s.sketch_budget = cfg.sketch_budget;
    s.n_sketches = cfg.n_sketches;
    if (!cfg.sketch_template_file.empty())
        s.template_text = read_text_file(cfg.sketch_template_file, "sketch template");
    return s;
}

PromptConfig prompt_config(const RunConfig& cfg) {
    PromptConfig p;
    p.generation_budget = cfg.budget;
    p.token_scale = cfg.token_scale;
    if (!cfg.completion_marker.empty()) p.marker = cfg.completion_marker;
    if (!cfg.prompt_template_file.empty())
        p.template_text = read_text_file(cfg.prompt_template_file, "prompt template");
    p.temperature = cfg.backend.temperature;
    p.max_output_tokens = cfg.backend.max_output_tokens;
    return p;
}

EeiConfig eei_config(const RunConfig& cfg) { return EeiConfig{cfg.min_name_sim}; }

MinerConfig miner_config(const RunConfig& cfg) {
    return MinerConfig{cfg.min_body_lines, cfg.context_lines};
}

CompileHookConfig compile_config(const RunConfig& cfg) {
    return CompileHookConfig{cfg.compile_hook, cfg.compile_timeout_seconds};
}

SimilarityConfig similarity_config(const RunConfig& cfg, EmbeddingProvider* provider) {
    return SimilarityConfig{parse_sim_mode(cfg.similarity), provider};
}

}  // namespace repofill
