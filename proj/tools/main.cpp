// repofill — repository-aware method body completion.
//
// Subcommands: index, mine, complete, eval. Configuration merges built-in
// defaults <- JSON config file (--config) <- command-line flags; the
// environment only ever supplies secret values (the API token named by the
// backend/embedding auth_env setting). Exit codes: 0 success, 1 per-item
// failures (some problems failed or some completions were unmatched),
// 2 fatal configuration or IO errors.

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <memory>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "repofill/config.hpp"
#include "repofill/embedding.hpp"
#include "repofill/index.hpp"
#include "repofill/miner.hpp"
#include "repofill/pipeline.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Flag values captured by CLI11; applied onto the RunConfig only when the
/// user actually passed them, so flags override the config file and the
/// file overrides the defaults.
struct FlagValues {
    std::string config_file;
    bool oracle = false;
    std::string similarity;
    std::string backend_kind;
    std::string endpoint;
    std::string model;
    std::string canned;
    std::string frontend;
    std::string compile_hook;
    double compile_timeout = 0.0;
    std::size_t k_usages = 0;
    std::size_t k_signature = 0;
    std::size_t budget = 0;
    std::uint64_t seed = 0;
    std::size_t workers = 0;
    std::size_t min_body_lines = 0;
    std::size_t context_lines = 0;
};

/// Registers the shared configuration flags on a subcommand.
void add_config_flags(CLI::App* cmd, FlagValues& f) {
    cmd->add_option("--config", f.config_file, "JSON config file (flags override it)")
        ->check(CLI::ExistingFile);
    cmd->add_flag("--oracle", f.oracle, "substitute the reference body for the sketch");
    cmd->add_option("--similarity", f.similarity, "similarity mode")
        ->check(CLI::IsMember({"lexical", "semantic", "hybrid"}));
    cmd->add_option("--backend", f.backend_kind, "completion backend kind")
        ->check(CLI::IsMember({"mock", "http"}));
    cmd->add_option("--endpoint", f.endpoint, "chat-completions URL for the http backend");
    cmd->add_option("--model", f.model, "model id sent to the backend");
    cmd->add_option("--canned", f.canned, "mock backend response table (JSON)");
    cmd->add_option("--frontend", f.frontend, "language frontend name");
    cmd->add_option("--k-usages", f.k_usages, "ranked usages kept per problem");
    cmd->add_option("--k-signature", f.k_signature, "signature-similar methods retrieved");
    cmd->add_option("--budget", f.budget, "generation prompt token budget");
    cmd->add_option("--seed", f.seed, "benchmark sampling seed");
    cmd->add_option("--workers", f.workers, "worker pool size (0 = logical cores)");
    cmd->add_option("--min-body-lines", f.min_body_lines, "miner: minimum non-blank body lines");
    cmd->add_option("--context-lines", f.context_lines, "miner: context lines kept per side");
    cmd->add_option("--compile-hook", f.compile_hook, "compile command template with {repo}");
    cmd->add_option("--compile-timeout", f.compile_timeout, "compile hook timeout (seconds)");
}

/// defaults <- config file <- flags, in that order.
repofill::RunConfig merge_config(const CLI::App* cmd, const FlagValues& f) {
    repofill::RunConfig cfg;
    if (!f.config_file.empty()) cfg = repofill::load_run_config(f.config_file);
    if (cmd->count("--oracle")) cfg.mode = "oracle";
    if (cmd->count("--similarity")) cfg.similarity = f.similarity;
    if (cmd->count("--backend")) cfg.backend.kind = f.backend_kind;
    if (cmd->count("--endpoint")) cfg.backend.endpoint = f.endpoint;
    if (cmd->count("--model")) cfg.backend.model = f.model;
    if (cmd->count("--canned")) cfg.backend.canned_file = f.canned;
    if (cmd->count("--frontend")) cfg.index.frontend = f.frontend;
    if (cmd->count("--k-usages")) cfg.k_usages = f.k_usages;
    if (cmd->count("--k-signature")) cfg.k_signature = f.k_signature;
    if (cmd->count("--budget")) cfg.budget = f.budget;
    if (cmd->count("--seed")) cfg.seed = f.seed;
    if (cmd->count("--workers")) cfg.workers = f.workers;
    if (cmd->count("--min-body-lines")) cfg.min_body_lines = f.min_body_lines;
    if (cmd->count("--context-lines")) cfg.context_lines = f.context_lines;
    if (cmd->count("--compile-hook")) cfg.compile_hook = f.compile_hook;
    if (cmd->count("--compile-timeout")) cfg.compile_timeout_seconds = f.compile_timeout;
    repofill::validate(cfg);
    return cfg;
}

void print_warnings(const repofill::RepositoryIndex& index) {
    for (const std::string& w : index.warnings) std::cerr << "warning: " << w << '\n';
}

int run_index(const CLI::App* cmd, const FlagValues& flags, const std::string& root,
              const std::string& out) {
    const repofill::RunConfig cfg = merge_config(cmd, flags);
    if (!std::filesystem::is_directory(root)) {
        std::cerr << "error: root is not a directory: " << root << '\n';
        return 2;
    }
    const auto t0 = Clock::now();
    const repofill::RepositoryIndex index = repofill::build_index(root, cfg.index);
    repofill::save_index(index, out);
    print_warnings(index);
    std::set<std::string> files;
    for (const auto& c : index.classes) files.insert(c.span.file_path);
    std::cout << "index: " << files.size() << " files, " << index.classes.size() << " classes, "
              << index.methods.size() << " methods, " << index.fields.size() << " fields, "
              << index.usage_edges.size() << " usage edges\n"
              << "snapshot: " << index.snapshot_id << '\n'
              << "written: " << out << '\n';
    std::printf("elapsed: %.3f s\n", seconds_since(t0));
    return 0;
}

int run_mine(const CLI::App* cmd, const FlagValues& flags, const std::string& root,
             const std::string& index_path, const std::string& out) {
    const repofill::RunConfig cfg = merge_config(cmd, flags);
    const auto t0 = Clock::now();
    const repofill::RepositoryIndex index = index_path.empty()
                                                ? repofill::build_index(root, cfg.index)
                                                : repofill::load_index(index_path);
    print_warnings(index);
    const repofill::BenchmarkManifest manifest =
        repofill::mine_problems(index, root, repofill::miner_config(cfg), cfg.seed);
    repofill::save_manifest(manifest, out);
    const repofill::FilterStats& s = manifest.stats;
    std::cout << "mined " << manifest.problems.size() << " problems from " << manifest.repo
              << " (snapshot " << manifest.snapshot_id << ")\n"
              << "candidates " << s.candidates << ": selected " << s.selected
              << ", eligible not sampled " << s.eligible_not_sampled << ", constructors "
              << s.constructors << ", getters " << s.getters << ", setters " << s.setters
              << ", too short " << s.too_short << ", no body " << s.no_body << '\n'
              << "classes without an eligible method: " << s.classes_without_eligible << '\n'
              << "written: " << out << '\n';
    if (manifest.problems.empty()) std::cerr << "warning: no eligible methods found\n";
    std::printf("elapsed: %.3f s\n", seconds_since(t0));
    return 0;
}

int run_complete(const CLI::App* cmd, const FlagValues& flags, const std::string& index_path,
                 const std::string& problems_path, const std::string& out,
                 const std::string& repo_root) {
    const repofill::RunConfig cfg = merge_config(cmd, flags);
    const auto t0 = Clock::now();
    const repofill::RepositoryIndex index = repofill::load_index(index_path);
    const repofill::BenchmarkManifest manifest = repofill::load_manifest(problems_path, repo_root);
    std::unique_ptr<repofill::EmbeddingProvider> provider;
    if (cfg.similarity != "lexical")
        provider = std::make_unique<repofill::HttpEmbeddingProvider>(cfg.embedding);
    const std::unique_ptr<repofill::Backend> backend = repofill::make_backend(cfg.backend);
    const repofill::CompletionRun run =
        repofill::run_completion(index, manifest.problems, *backend, cfg, provider.get());
    repofill::save_completions(run, out);
    double retrieval_sum = 0.0;
    for (const repofill::ProblemResult& r : run.results) {
        retrieval_sum += r.retrieval_seconds;
        std::printf("%s  retrieval %.3fs  total %.3fs%s%s\n", r.id.c_str(), r.retrieval_seconds,
                    r.total_seconds, r.failed ? "  FAILED: " : "",
                    r.failed ? r.error.c_str() : "");
    }
    std::cout << "completions: " << run.results.size() << " problems, " << run.failures
              << " failures (snapshot " << run.snapshot_id << ")\n"
              << "written: " << out << '\n';
    if (!run.results.empty())
        std::printf("mean retrieval: %.3f s/problem\n",
                    retrieval_sum / static_cast<double>(run.results.size()));
    std::printf("elapsed: %.3f s\n", seconds_since(t0));
    return run.failures > 0 ? 1 : 0;
}

int run_eval(const CLI::App* cmd, const FlagValues& flags, const std::string& problems_path,
             const std::string& completions_path, const std::string& out,
             const std::string& repo_root) {
    const repofill::RunConfig cfg = merge_config(cmd, flags);
    const auto t0 = Clock::now();
    const repofill::BenchmarkManifest manifest = repofill::load_manifest(problems_path, repo_root);
    const repofill::LoadedCompletions completions = repofill::load_completions(completions_path);
    const repofill::MetricReport report = repofill::evaluate_completions(manifest, completions, cfg);
    repofill::save_report(report, out);
    std::cout << render_report_table(report) << "written: " << out << '\n';
    std::printf("elapsed: %.3f s\n", seconds_since(t0));
    return report.unmatched_completion_ids.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"repository-aware method body completion"};
    app.require_subcommand(1);

    FlagValues flags;
    std::string root, out, index_path, problems_path, completions_path, repo_root;

    CLI::App* index_cmd = app.add_subcommand("index", "index a repository's declarations");
    index_cmd->add_option("--root", root, "repository root directory")->required();
    index_cmd->add_option("--out", out, "index output file")->required();
    add_config_flags(index_cmd, flags);

    CLI::App* mine_cmd = app.add_subcommand("mine", "mine completion problems from a repository");
    mine_cmd->add_option("--root", root, "repository root directory")->required();
    mine_cmd->add_option("--index", index_path, "reuse a saved index instead of re-indexing");
    mine_cmd->add_option("--out", out, "benchmark manifest output file")->required();
    add_config_flags(mine_cmd, flags);

    CLI::App* complete_cmd = app.add_subcommand("complete", "complete mined problems");
    complete_cmd->add_option("--index", index_path, "saved repository index")->required();
    complete_cmd->add_option("--problems", problems_path, "benchmark manifest")->required();
    complete_cmd->add_option("--out", out, "completions output file")->required();
    complete_cmd->add_option("--repo-root", repo_root, "repository checkout the problems refer to");
    add_config_flags(complete_cmd, flags);

    CLI::App* eval_cmd = app.add_subcommand("eval", "score completions against references");
    eval_cmd->add_option("--problems", problems_path, "benchmark manifest")->required();
    eval_cmd->add_option("--completions", completions_path, "completions file")->required();
    eval_cmd->add_option("--out", out, "metric report output file")->required();
    eval_cmd->add_option("--repo-root", repo_root, "repository checkout for the compile hook");
    add_config_flags(eval_cmd, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*index_cmd) return run_index(index_cmd, flags, root, out);
        if (*mine_cmd) return run_mine(mine_cmd, flags, root, index_path, out);
        if (*complete_cmd)
            return run_complete(complete_cmd, flags, index_path, problems_path, out, repo_root);
        if (*eval_cmd)
            return run_eval(eval_cmd, flags, problems_path, completions_path, out, repo_root);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;  // unreachable: require_subcommand guarantees one branch
}
