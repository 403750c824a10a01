#include "repofill/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "repofill/essentials.hpp"
#include "repofill/metrics.hpp"
#include "repofill/prompt.hpp"
#include "repofill/usages.hpp"

namespace repofill {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Runs fn(0..n-1) on a pool of `workers` threads (0 = logical cores).
/// Tasks are claimed by atomic counter; the first escaped exception is
/// rethrown after the pool drains.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    std::size_t pool = workers != 0 ? workers : std::max(1u, std::thread::hardware_concurrency());
    pool = std::min(pool, n);
    if (pool <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex error_mu;
    std::exception_ptr first_error;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (std::size_t t = 0; t < pool; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct StageConfigs {
    SketchConfig sketch;
    PromptConfig prompt;
    EeiConfig eei;
    SimilarityConfig sim;
    std::string mode;
    std::size_t k_usages = 10;
};

StageConfigs derive_stage_configs(const RunConfig& cfg, EmbeddingProvider* provider) {
    return StageConfigs{sketch_config(cfg), prompt_config(cfg), eei_config(cfg),
                        similarity_config(cfg, provider), cfg.mode, cfg.k_usages};
}

ProblemResult run_one(const RepositoryIndex& index, const MbcProblem& problem, Backend& backend,
                      const StageConfigs& sc) {
    ProblemResult r;
    r.id = problem_id(problem);
    const auto t_start = Clock::now();
    try {
        const MethodDecl* infilling = find_infilling_method(index, problem);

        auto t_stage = Clock::now();
        std::vector<const MethodDecl*> L =
            retrieve_signature_similar(index, problem, sc.sketch.k_signature, sc.sim);
        r.retrieval_seconds += seconds_since(t_stage);
        for (const MethodDecl* m : L) r.trace.signature_similar.push_back(m->qualified_name);

        Sketch sketch;
        if (sc.mode == "oracle") {
            if (!problem.reference_body)
                throw std::runtime_error("oracle mode requires a reference body");
            sketch.body_text = *problem.reference_body;
            sketch.parse_ok = true;
        } else {
            sketch = generate_sketch(problem, L, backend, sc.sketch);
        }
        r.trace.sketch_ok = sketch.parse_ok;

        t_stage = Clock::now();
        const SketchAnalysis analysis = analyze_sketch(sketch);
        r.trace.analysis_degraded = analysis.degraded;
        const EssentialElements essentials = identify_essentials(index, analysis, sc.eei, infilling);
        for (const MethodDecl* m : essentials.methods)
            r.trace.essential_elements.push_back("method:" + m->qualified_name);
        for (const FieldDecl* f : essentials.fields)
            r.trace.essential_elements.push_back("field:" + f->qualified_name);
        for (const ClassDecl* c : essentials.classes)
            r.trace.essential_elements.push_back("class:" + c->qualified_name);
        const std::vector<UsageCandidate> candidates = extract_usages(index, essentials, infilling);
        const RankingOutcome ranked = rank_usages(candidates, sketch, sc.sim, sc.k_usages);
        r.retrieval_seconds += seconds_since(t_stage);
        r.trace.ranking_degraded = ranked.degraded;
        for (const RankedUsage& u : ranked.usages)
            r.trace.usages.push_back(
                StageTrace::UsageRow{u.method->qualified_name, u.score, u.via_elements});

        const ContextBundle bundle =
            build_context(problem, std::move(L), ranked, std::move(sketch), sc.mode);
        const Completion completion = complete(problem, bundle, backend, sc.prompt);
        r.body = completion.body_text;
        r.extraction_ok = completion.extraction_ok;
        r.trace.prompt_tokens = completion.prompt.token_count;
        r.trace.prompt_truncated = completion.prompt.truncated;
    } catch (const std::exception& e) {
        r.failed = true;
        r.error = e.what();
        r.body.clear();
        r.extraction_ok = false;
    }
    r.total_seconds = seconds_since(t_start);
    return r;
}

json trace_to_json(const StageTrace& t) {
    json usages = json::array();
    for (const auto& u : t.usages)
        usages.push_back(json{{"qualified_name", u.qualified_name},
                              {"score", u.score},
                              {"via_elements", u.via_elements}});
    return json{{"analysis_degraded", t.analysis_degraded},
                {"essential_elements", t.essential_elements},
                {"prompt_tokens", t.prompt_tokens},
                {"prompt_truncated", t.prompt_truncated},
                {"ranking_degraded", t.ranking_degraded},
                {"signature_similar", t.signature_similar},
                {"sketch_ok", t.sketch_ok},
                {"usages", usages}};
}

[[noreturn]] void malformed(const std::filesystem::path& path, std::size_t line,
                            const std::string& what) {
    throw std::runtime_error("malformed completions record at " + path.string() + ":" +
                             std::to_string(line) + ": " + what);
}

}  // namespace

std::string problem_id(const MbcProblem& problem) {
    return problem.file_path + ":" + std::to_string(problem.body_start.start_line);
}

ProblemResult complete_problem(const RepositoryIndex& index, const MbcProblem& problem,
                               Backend& backend, const RunConfig& cfg,
                               EmbeddingProvider* provider) {
    validate(cfg);
    return run_one(index, problem, backend, derive_stage_configs(cfg, provider));
}

CompletionRun run_completion(const RepositoryIndex& index, const std::vector<MbcProblem>& problems,
                             Backend& backend, const RunConfig& cfg, EmbeddingProvider* provider) {
    validate(cfg);
    const StageConfigs sc = derive_stage_configs(cfg, provider);
    CompletionRun run;
    run.config = cfg;
    run.snapshot_id = index.snapshot_id;
    run.results.resize(problems.size());
    parallel_for(problems.size(), cfg.workers,
                 [&](std::size_t i) { run.results[i] = run_one(index, problems[i], backend, sc); });
    for (const ProblemResult& r : run.results)
        if (r.failed) ++run.failures;
    return run;
}

void save_completions(const CompletionRun& run, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write completions file: " + path.string());
    out << json{{"config", to_json(run.config)}, {"snapshot_id", run.snapshot_id}}.dump() << '\n';
    for (const ProblemResult& r : run.results) {
        out << json{{"body", r.body},
                    {"error", r.error},
                    {"extraction_ok", r.extraction_ok},
                    {"failed", r.failed},
                    {"id", r.id},
                    {"trace", trace_to_json(r.trace)}}
                   .dump()
            << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

LoadedCompletions load_completions(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read completions file: " + path.string());
    LoadedCompletions loaded;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::set<std::string> seen_ids;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            malformed(path, line_no, e.what());
        }
        if (!header_seen) {
            if (!j.is_object() || !j.contains("config") || !j.contains("snapshot_id"))
                malformed(path, line_no, "expected header record with config and snapshot_id");
            loaded.config = j["config"];
            loaded.snapshot_id = j["snapshot_id"].get<std::string>();
            header_seen = true;
            continue;
        }
        if (!j.is_object() || !j.contains("id") || !j.contains("body"))
            malformed(path, line_no, "expected completion record with id and body");
        std::string id = j["id"].get<std::string>();
        if (!seen_ids.insert(id).second) malformed(path, line_no, "duplicate id " + id);
        loaded.bodies.emplace_back(std::move(id), j["body"].get<std::string>());
    }
    // A zero-length file is a valid "no completions" input; a file with
    // records but no header is not (caught above on the first record).
    return loaded;
}

MetricReport evaluate_completions(const BenchmarkManifest& manifest,
                                  const LoadedCompletions& completions, const RunConfig& cfg) {
    validate(cfg);
    std::map<std::string, const std::string*> by_id;
    for (const auto& [id, body] : completions.bodies) by_id.emplace(id, &body);

    MetricReport report;
    report.config_snapshot = to_json(cfg);
    report.snapshot_id = completions.snapshot_id;
    report.mode = completions.config.is_object() ? completions.config.value("mode", cfg.mode)
                                                 : cfg.mode;

    std::set<std::string> problem_ids;
    for (const MbcProblem& p : manifest.problems) {
        const std::string id = problem_id(p);
        if (!problem_ids.insert(id).second)
            throw std::runtime_error("duplicate problem id in manifest: " + id);
    }
    for (const auto& [id, body] : completions.bodies)
        if (!problem_ids.count(id)) report.unmatched_completion_ids.push_back(id);

    const CompileHookConfig hook = compile_config(cfg);
    report.rows.resize(manifest.problems.size());
    parallel_for(manifest.problems.size(), cfg.workers, [&](std::size_t i) {
        const MbcProblem& p = manifest.problems[i];
        MetricRow row;
        row.id = problem_id(p);
        const auto it = by_id.find(row.id);
        const std::string& candidate = it != by_id.end() ? *it->second : std::string{};
        const std::string& reference = p.reference_body ? *p.reference_body : std::string{};
        row.bleu = bleu(candidate, reference);
        const CodeBleuScore cb = codebleu(candidate, reference, cfg.index.frontend);
        row.codebleu = cb.score;
        row.codebleu_degraded = cb.degraded;
        row.exact_match = exact_match(candidate, reference);
        if (!hook.hook_cmd.empty()) {
            const CompileOutcome outcome = compile_check(p, candidate, hook);
            row.compile_ok = outcome.compiled;
            if (!outcome.compiled.has_value()) row.compile_note = outcome.note;
        }
        report.rows[i] = std::move(row);
    });

    double bleu_sum = 0.0, cb_sum = 0.0;
    std::size_t em_count = 0, compile_seen = 0, compile_true = 0;
    for (const MetricRow& row : report.rows) {
        bleu_sum += row.bleu;
        cb_sum += row.codebleu;
        if (row.exact_match) ++em_count;
        if (row.compile_ok.has_value()) {
            ++compile_seen;
            if (*row.compile_ok) ++compile_true;
        }
    }
    const std::size_t n = report.rows.size();
    if (n > 0) {
        report.bleu_mean = bleu_sum / static_cast<double>(n);
        report.codebleu_mean = cb_sum / static_cast<double>(n);
        report.exact_match_rate = static_cast<double>(em_count) / static_cast<double>(n);
    }
    if (compile_seen > 0)
        report.compile_rate = static_cast<double>(compile_true) / static_cast<double>(compile_seen);
    return report;
}

void save_report(const MetricReport& report, const std::filesystem::path& path) {
    json rows = json::array();
    for (const MetricRow& row : report.rows) {
        json r{{"bleu", row.bleu},
               {"codebleu", row.codebleu},
               {"codebleu_degraded", row.codebleu_degraded},
               {"compile_note", row.compile_note},
               {"exact_match", row.exact_match},
               {"id", row.id}};
        r["compile_ok"] = row.compile_ok.has_value() ? json(*row.compile_ok) : json(nullptr);
        rows.push_back(std::move(r));
    }
    json j{{"aggregates",
            {{"bleu_mean", report.bleu_mean},
             {"codebleu_mean", report.codebleu_mean},
             {"compile_rate",
              report.compile_rate.has_value() ? json(*report.compile_rate) : json(nullptr)},
             {"exact_match_rate", report.exact_match_rate},
             {"problems", report.rows.size()}}},
           {"config", report.config_snapshot},
           {"mode", report.mode},
           {"rows", rows},
           {"snapshot_id", report.snapshot_id},
           {"unmatched_completion_ids", report.unmatched_completion_ids}};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write report file: " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string render_report_table(const MetricReport& report) {
    std::size_t id_width = std::string("problem").size();
    for (const MetricRow& row : report.rows) id_width = std::max(id_width, row.id.size());

    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-*s  %8s  %8s  %5s  %7s\n", static_cast<int>(id_width),
                  "problem", "bleu", "codebleu", "exact", "compile");
    out << buf;
    for (const MetricRow& row : report.rows) {
        const char* compile = !row.compile_ok.has_value() ? "n/a" : (*row.compile_ok ? "yes" : "no");
        std::snprintf(buf, sizeof(buf), "%-*s  %8.2f  %8.2f  %5s  %7s%s\n",
                      static_cast<int>(id_width), row.id.c_str(), row.bleu, row.codebleu,
                      row.exact_match ? "yes" : "no", compile,
                      row.codebleu_degraded ? "  [codebleu degraded]" : "");
        out << buf;
    }
    std::string compile_agg = "n/a";
    if (report.compile_rate.has_value()) {
        std::snprintf(buf, sizeof(buf), "%.1f%%", *report.compile_rate * 100.0);
        compile_agg = buf;
    }
    std::string em_agg;
    std::snprintf(buf, sizeof(buf), "%.1f%%", report.exact_match_rate * 100.0);
    em_agg = buf;
    std::snprintf(buf, sizeof(buf), "%-*s  %8.2f  %8.2f  %5s  %7s\n", static_cast<int>(id_width),
                  ("aggregate (" + std::to_string(report.rows.size()) + ")").c_str(),
                  report.bleu_mean, report.codebleu_mean, em_agg.c_str(), compile_agg.c_str());
    out << buf;
    for (const std::string& id : report.unmatched_completion_ids)
        out << "unmatched completion id: " << id << '\n';
    return out.str();
}

}  // namespace repofill
