// End-to-end checks of the command-line binary: every subcommand is invoked
// as a child process, exactly as a user would run it.
#include <doctest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "repofill/miner.hpp"
#include "repofill/pipeline.hpp"

using namespace repofill;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = REPOFILL_FIXTURES;
const std::string kBinary = REPOFILL_BIN;

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

/// Runs the binary through the shell, capturing stdout/stderr separately.
/// env_prefix is prepended verbatim (e.g. "VAR=value").
CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    static std::atomic<int> counter{0};
    const std::string tag =
        std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1));
    const fs::path out_path = fs::temp_directory_path() / ("repofill-cli-out-" + tag);
    const fs::path err_path = fs::temp_directory_path() / ("repofill-cli-err-" + tag);
    const std::string cmd = env_prefix + (env_prefix.empty() ? "" : " ") + kBinary + " " + args +
                            " >" + out_path.string() + " 2>" + err_path.string();
    const int rc = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = (rc != -1 && WIFEXITED(rc)) ? WEXITSTATUS(rc) : -1;
    r.out = read_file(out_path);
    r.err = read_file(err_path);
    fs::remove(out_path);
    fs::remove(err_path);
    return r;
}

/// Index + manifest for the filters fixture, produced once through the
/// binary itself.
struct CliEnv {
    fs::path dir;
    fs::path index_file;
    fs::path manifest_file;

    static const CliEnv& get() {
        static CliEnv env = [] {
            CliEnv e;
            e.dir = fs::temp_directory_path() / ("repofill-cli-env-" + std::to_string(::getpid()));
            fs::create_directories(e.dir);
            e.index_file = e.dir / "index.json";
            e.manifest_file = e.dir / "bench.jsonl";
            const CliResult ix = run_cli("index --root " + (kFixtures / "filters").string() +
                                         " --out " + e.index_file.string());
            REQUIRE_MESSAGE(ix.exit_code == 0, ix.err);
            const CliResult mine =
                run_cli("mine --root " + (kFixtures / "filters").string() + " --index " +
                        e.index_file.string() + " --out " + e.manifest_file.string() + " --seed 7");
            REQUIRE_MESSAGE(mine.exit_code == 0, mine.err);
            return e;
        }();
        return env;
    }
};

/// Writes a completions file whose bodies are the manifest's references.
fs::path write_identity_completions(const fs::path& manifest_path, const fs::path& out,
                                    const std::string& extra_id = "") {
    const BenchmarkManifest manifest = load_manifest(manifest_path, "");
    std::ofstream file(out, std::ios::binary | std::ios::trunc);
    file << R"({"config":{},"snapshot_id":"fixture"})" << '\n';
    for (const MbcProblem& p : manifest.problems)
        file << nlohmann::json{{"body", *p.reference_body}, {"id", problem_id(p)}}.dump() << '\n';
    if (!extra_id.empty())
        file << nlohmann::json{{"body", "{}"}, {"id", extra_id}}.dump() << '\n';
    return out;
}

}  // namespace

TEST_CASE("index prints counts and writes a deterministic file") {
    const CliEnv& env = CliEnv::get();
    const CliResult r = run_cli("index --root " + (kFixtures / "filters").string() + " --out " +
                                (env.dir / "index-repeat.json").string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("4 classes") != std::string::npos);
    CHECK(r.out.find("12 methods") != std::string::npos);
    CHECK(r.out.find("snapshot:") != std::string::npos);
    CHECK(r.out.find("elapsed:") != std::string::npos);
    CHECK(read_file(env.dir / "index-repeat.json") == read_file(env.index_file));
}

TEST_CASE("index exits nonzero on a nonexistent root") {
    const CliResult r = run_cli("index --root /nonexistent/repo --out /tmp/never.json");
    CHECK(r.exit_code == 2);
    CHECK(!r.err.empty());
}

TEST_CASE("index exits nonzero when nothing is parsable") {
    const fs::path empty = fs::temp_directory_path() / "repofill-cli-empty-repo";
    fs::create_directories(empty);
    const CliResult r = run_cli("index --root " + empty.string() + " --out /tmp/never.json");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("empty index") != std::string::npos);
    fs::remove_all(empty);
}

TEST_CASE("mine reports filter stats and is deterministic per seed") {
    const CliEnv& env = CliEnv::get();
    const fs::path again = env.dir / "bench-repeat.jsonl";
    const CliResult r = run_cli("mine --root " + (kFixtures / "filters").string() + " --index " +
                                env.index_file.string() + " --out " + again.string() + " --seed 7");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("mined 4 problems") != std::string::npos);
    CHECK(r.out.find("constructors 2") != std::string::npos);
    CHECK(r.out.find("getters 3") != std::string::npos);
    CHECK(r.out.find("setters 2") != std::string::npos);
    CHECK(r.out.find("too short 1") != std::string::npos);
    CHECK(read_file(again) == read_file(env.manifest_file));
}

TEST_CASE("complete with the mock backend is deterministic and prints timings") {
    const CliEnv& env = CliEnv::get();
    const fs::path c1 = env.dir / "completions-1.jsonl";
    const fs::path c2 = env.dir / "completions-2.jsonl";
    const std::string base = "complete --index " + env.index_file.string() + " --problems " +
                             env.manifest_file.string() + " --backend mock --workers 2 --out ";
    const CliResult r1 = run_cli(base + c1.string());
    const CliResult r2 = run_cli(base + c2.string());
    CHECK(r1.exit_code == 0);
    CHECK(r2.exit_code == 0);
    CHECK(r1.out.find("retrieval") != std::string::npos);
    CHECK(r1.out.find("0 failures") != std::string::npos);
    CHECK(r1.out.find("mean retrieval:") != std::string::npos);
    CHECK(read_file(c1) == read_file(c2));
}

TEST_CASE("complete --oracle records oracle mode in the run config") {
    const CliEnv& env = CliEnv::get();
    const fs::path out = env.dir / "completions-oracle.jsonl";
    const CliResult r = run_cli("complete --index " + env.index_file.string() + " --problems " +
                                env.manifest_file.string() + " --backend mock --oracle --out " +
                                out.string());
    CHECK(r.exit_code == 0);
    const LoadedCompletions loaded = load_completions(out);
    CHECK(loaded.config["mode"] == "oracle");
    CHECK(loaded.bodies.size() == 4);
}

TEST_CASE("eval scores identity completions at a perfect exact-match rate") {
    const CliEnv& env = CliEnv::get();
    const fs::path comp = write_identity_completions(env.manifest_file, env.dir / "identity.jsonl");
    const fs::path report = env.dir / "report-identity.json";
    const CliResult r = run_cli("eval --problems " + env.manifest_file.string() +
                                " --completions " + comp.string() + " --out " + report.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("100.0%") != std::string::npos);
    CHECK(r.out.find("aggregate (4)") != std::string::npos);
    const auto j = nlohmann::json::parse(read_file(report));
    CHECK(j["aggregates"]["exact_match_rate"] == 1.0);
}

TEST_CASE("eval lists unmatched completion ids and exits 1") {
    const CliEnv& env = CliEnv::get();
    const fs::path comp = write_identity_completions(env.manifest_file, env.dir / "ghost.jsonl",
                                                     "ghost/File.java:99");
    const CliResult r = run_cli("eval --problems " + env.manifest_file.string() +
                                " --completions " + comp.string() + " --out " +
                                (env.dir / "report-ghost.json").string());
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("unmatched completion id: ghost/File.java:99") != std::string::npos);
}

TEST_CASE("eval of an empty completions file scores every problem zero") {
    const CliEnv& env = CliEnv::get();
    const fs::path comp = env.dir / "empty.jsonl";
    std::ofstream(comp, std::ios::trunc).flush();
    const fs::path report = env.dir / "report-empty.json";
    const CliResult r = run_cli("eval --problems " + env.manifest_file.string() +
                                " --completions " + comp.string() + " --out " + report.string());
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(read_file(report));
    CHECK(j["aggregates"]["bleu_mean"] == 0.0);
    CHECK(j["aggregates"]["exact_match_rate"] == 0.0);
    CHECK(j["rows"].size() == 4);
}

TEST_CASE("bad invocations exit 2") {
    const CliEnv& env = CliEnv::get();
    CHECK(run_cli("bogus-subcommand").exit_code == 2);
    CHECK(run_cli("index --root x").exit_code == 2);  // missing required --out
    CHECK(run_cli("complete --index " + env.index_file.string() + " --problems " +
                  env.manifest_file.string() + " --out /tmp/x --similarity fuzzy")
              .exit_code == 2);
    CHECK(run_cli("complete --index " + env.index_file.string() + " --problems " +
                  env.manifest_file.string() + " --out /tmp/x --backend carrier-pigeon")
              .exit_code == 2);
    // Config-level validation failures are fatal too.
    const fs::path bad_cfg = env.dir / "bad-config.json";
    std::ofstream(bad_cfg, std::ios::trunc) << R"({"budget": 0})";
    CHECK(run_cli("complete --index " + env.index_file.string() + " --problems " +
                  env.manifest_file.string() + " --out /tmp/x --config " + bad_cfg.string())
              .exit_code == 2);
    const fs::path unknown_cfg = env.dir / "unknown-config.json";
    std::ofstream(unknown_cfg, std::ios::trunc) << R"({"budgets": 10})";
    const CliResult r = run_cli("complete --index " + env.index_file.string() + " --problems " +
                                env.manifest_file.string() + " --out /tmp/x --config " +
                                unknown_cfg.string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("unknown config key: budgets") != std::string::npos);
}

TEST_CASE("help exits 0") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("complete --help").exit_code == 0);
}

TEST_CASE("backend outages exit 1 and the auth token never reaches any output") {
    const CliEnv& env = CliEnv::get();
    const std::string secret = "sk-cli-secret-4242-do-not-log";
    const fs::path cfg = env.dir / "http-config.json";
    std::ofstream(cfg, std::ios::trunc) << R"({"backend": {"kind": "http", )"
                                        << R"("endpoint": "http://127.0.0.1:9/v1/chat/completions", )"
                                        << R"("model": "test-model", )"
                                        << R"("retries": 0, "timeout_seconds": 2.0}})";
    const fs::path out = env.dir / "completions-outage.jsonl";
    const CliResult r = run_cli("complete --index " + env.index_file.string() + " --problems " +
                                    env.manifest_file.string() + " --out " + out.string() +
                                    " --config " + cfg.string(),
                                "REPOFILL_API_TOKEN=" + secret);
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("FAILED") != std::string::npos);
    CHECK(r.out.find("4 failures") != std::string::npos);
    // Log scan: the secret is absent from stdout, stderr, and the output file.
    CHECK(r.out.find(secret) == std::string::npos);
    CHECK(r.err.find(secret) == std::string::npos);
    const std::string written = read_file(out);
    CHECK(written.find(secret) == std::string::npos);
    // The failure itself was recorded per problem.
    const LoadedCompletions loaded = load_completions(out);
    CHECK(loaded.bodies.size() == 4);
}
