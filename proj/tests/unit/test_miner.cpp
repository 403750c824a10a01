#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "repofill/index.hpp"
#include "repofill/miner.hpp"
#include "repofill/text.hpp"

using namespace repofill;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fixture(const std::string& name) { return fs::path(REPOFILL_FIXTURES) / name; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::size_t non_blank_lines(const std::string& text) {
    std::size_t count = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string_view line(text.data() + start,
                              (nl == std::string::npos ? text.size() : nl) - start);
        if (!is_blank_line(line)) ++count;
        if (nl == std::string::npos) break;
        start = nl + 1;
    }
    return count;
}

bool has_import_line(const std::string& text) {
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string line = text.substr(start, (nl == std::string::npos ? text.size() : nl) - start);
        std::size_t i = line.find_first_not_of(" \t");
        if (i != std::string::npos && line.compare(i, 7, "import ") == 0) return true;
        if (nl == std::string::npos) break;
        start = nl + 1;
    }
    return false;
}

fs::path make_temp_dir(const std::string& tag) {
    static int counter = 0;
    fs::path dir = fs::temp_directory_path() /
                   ("repofill-miner-" + tag + "-" + std::to_string(::getpid()) + "-" +
                    std::to_string(counter++));
    fs::create_directories(dir);
    return dir;
}

std::size_t stats_sum(const FilterStats& s) {
    return s.selected + s.eligible_not_sampled + s.constructors + s.getters + s.setters +
           s.too_short + s.no_body;
}

}  // namespace

TEST_CASE("filter fixture yields exactly the four eligible methods") {
    RepositoryIndex index = build_index(fixture("filters"), {});
    BenchmarkManifest m = mine_problems(index, fixture("filters"), {}, 7);

    CHECK(m.repo == "filters");
    CHECK(m.snapshot_id == index.snapshot_id);
    CHECK(m.file_count == 4);
    CHECK(m.method_count == index.methods.size());

    REQUIRE(m.problems.size() == 4);
    std::vector<std::string> signatures;
    for (const auto& p : m.problems) signatures.push_back(p.signature_text);
    // classes iterate sorted: Alpha, Bravo, Charlie, Delta; each has exactly
    // one eligible method, so the pick is seed-independent
    CHECK(signatures[0] == "public void fill(int count)");
    CHECK(signatures[1] == "public String describe(int width)");
    CHECK(signatures[2] == "public int accumulate(int[] values)");
    CHECK(signatures[3] == "public Integer lookup(String key)");

    const FilterStats& s = m.stats;
    CHECK(s.candidates == 12);
    CHECK(s.selected == 4);
    CHECK(s.eligible_not_sampled == 0);
    CHECK(s.constructors == 2);
    CHECK(s.getters == 3);
    CHECK(s.setters == 2);
    CHECK(s.too_short == 1);
    CHECK(s.no_body == 0);
    CHECK(s.classes_without_eligible == 0);
    CHECK(stats_sum(s) == s.candidates);
    // the 8 exclusions all land in a reason bucket
    CHECK(s.constructors + s.getters + s.setters + s.too_short == 8);
}

TEST_CASE("mined problems satisfy the benchmark invariants") {
    RepositoryIndex index = build_index(fixture("filters"), {});
    BenchmarkManifest m = mine_problems(index, fixture("filters"), {}, 31);
    REQUIRE(m.problems.size() == 4);
    for (const MbcProblem& p : m.problems) {
        INFO(p.signature_text);
        REQUIRE(p.reference_body.has_value());
        CHECK(non_blank_lines(*p.reference_body) >= 3);
        CHECK_FALSE(p.signature_text.empty());
        CHECK_FALSE(has_import_line(p.left_context));
        CHECK(p.body_start.end_byte > p.body_start.start_byte);
        // span fidelity: the recorded bytes reproduce the reference body
        std::string content = slurp(fixture("filters") / p.file_path);
        CHECK(content.substr(p.body_start.start_byte,
                             p.body_start.end_byte - p.body_start.start_byte) ==
              *p.reference_body);
        // left context ends right before the method declaration
        CHECK(p.left_context.find("class") != std::string::npos);
    }
    // Alpha and Delta really had imports to strip
    CHECK(slurp(fixture("filters") / "src/main/java/bench/Alpha.java").find("import ") !=
          std::string::npos);
}

TEST_CASE("getter and setter detection resolves fields and parameters") {
    RepositoryIndex index = build_index(fixture("filters"), {});
    auto method = [&](const std::string& q) {
        const MethodDecl* m = index.find_method(q);
        REQUIRE(m != nullptr);
        return *m;
    };

    CHECK(is_trivial_getter(method("bench.Alpha.getSize()"), index));
    CHECK(is_trivial_getter(method("bench.Bravo.getLabel()"), index));  // this-qualified
    CHECK(is_trivial_getter(method("bench.Charlie.getTotal()"), index));
    CHECK_FALSE(is_trivial_getter(method("bench.Charlie.half()"), index));  // expression
    CHECK_FALSE(is_trivial_getter(method("bench.Bravo.describe(int)"), index));

    CHECK(is_trivial_setter(method("bench.Bravo.setLabel(String)"), index));
    CHECK(is_trivial_setter(method("bench.Charlie.setTotal(int)"), index));
    CHECK_FALSE(is_trivial_setter(method("bench.Alpha.fill(int)"), index));

    // the returned name must be a real field of the owner
    MethodDecl ghost = method("bench.Alpha.getSize()");
    ghost.body_text = "{ return missing; }";
    CHECK_FALSE(is_trivial_getter(ghost, index));
    ghost.body_text = "{ return size; }";
    CHECK(is_trivial_getter(ghost, index));

    // the assigned value must be a parameter, the target a field
    MethodDecl fake = method("bench.Charlie.setTotal(int)");
    fake.body_text = "{ this.total = other; }";
    CHECK_FALSE(is_trivial_setter(fake, index));
    fake.body_text = "{ this.bogus = value; }";
    CHECK_FALSE(is_trivial_setter(fake, index));
    fake.body_text = "{ this.total = value; }";
    CHECK(is_trivial_setter(fake, index));
}

TEST_CASE("mining is deterministic per seed and sensitive to it") {
    RepositoryIndex index = build_index(fixture("users"), {});
    auto signatures = [&](std::uint64_t seed) {
        BenchmarkManifest m = mine_problems(index, fixture("users"), {}, seed);
        std::vector<std::string> sigs;
        for (const auto& p : m.problems) sigs.push_back(p.signature_text);
        return sigs;
    };
    CHECK(signatures(42) == signatures(42));

    // app.Users holds several eligible methods, so some pair of seeds picks
    // differently; every seed still yields one problem per eligible class.
    std::set<std::vector<std::string>> distinct;
    for (std::uint64_t seed = 0; seed < 20; ++seed) distinct.insert(signatures(seed));
    CHECK(distinct.size() >= 2);

    BenchmarkManifest m = mine_problems(index, fixture("users"), {}, 0);
    CHECK(stats_sum(m.stats) == m.stats.candidates);
}

TEST_CASE("filters fixture mining is byte-stable across repeated runs") {
    RepositoryIndex index = build_index(fixture("filters"), {});
    fs::path dir = make_temp_dir("stable");
    fs::path a = dir / "a.jsonl";
    fs::path b = dir / "b.jsonl";
    save_manifest(mine_problems(index, fixture("filters"), {}, 5), a);
    save_manifest(mine_problems(index, fixture("filters"), {}, 5), b);
    CHECK(slurp(a) == slurp(b));
    std::error_code ec;
    fs::remove_all(dir, ec);
}

TEST_CASE("manifest lines carry exactly the documented fields") {
    RepositoryIndex index = build_index(fixture("filters"), {});
    BenchmarkManifest m = mine_problems(index, fixture("filters"), {}, 11);
    fs::path dir = make_temp_dir("fields");
    fs::path path = dir / "manifest.jsonl";
    save_manifest(m, path);

    std::ifstream in(path);
    std::string line;
    std::size_t lines = 0;
    const std::set<std::string> want = {"repo",          "path", "signature",      "left_context",
                                        "right_context", "span", "reference_body"};
    while (std::getline(in, line)) {
        ++lines;
        json record = json::parse(line);
        std::set<std::string> keys;
        for (const auto& [k, v] : record.items()) keys.insert(k);
        CHECK(keys == want);
        std::set<std::string> span_keys;
        for (const auto& [k, v] : record.at("span").items()) span_keys.insert(k);
        CHECK(span_keys == std::set<std::string>{"start_line", "end_line", "start_byte",
                                                 "end_byte"});
        CHECK(record.at("repo").get<std::string>() == "filters");
    }
    CHECK(lines == m.problems.size());
    std::error_code ec;
    fs::remove_all(dir, ec);
}

TEST_CASE("manifests round-trip through the line format") {
    RepositoryIndex index = build_index(fixture("filters"), {});
    BenchmarkManifest m = mine_problems(index, fixture("filters"), {}, 13);
    fs::path dir = make_temp_dir("roundtrip");
    fs::path path = dir / "manifest.jsonl";
    save_manifest(m, path);

    BenchmarkManifest back = load_manifest(path, "/elsewhere/checkout");
    CHECK(back.repo == "filters");
    REQUIRE(back.problems.size() == m.problems.size());
    for (std::size_t i = 0; i < m.problems.size(); ++i) {
        const MbcProblem& a = m.problems[i];
        const MbcProblem& b = back.problems[i];
        CHECK(b.repo_root == "/elsewhere/checkout");
        CHECK(b.file_path == a.file_path);
        CHECK(b.signature_text == a.signature_text);
        CHECK(b.left_context == a.left_context);
        CHECK(b.right_context == a.right_context);
        CHECK(b.reference_body == a.reference_body);
        CHECK(b.body_start.file_path == a.body_start.file_path);
        CHECK(b.body_start.start_line == a.body_start.start_line);
        CHECK(b.body_start.end_line == a.body_start.end_line);
        CHECK(b.body_start.start_byte == a.body_start.start_byte);
        CHECK(b.body_start.end_byte == a.body_start.end_byte);
    }
    std::error_code ec;
    fs::remove_all(dir, ec);
}

TEST_CASE("manifest loading rejects malformed records with a location") {
    fs::path dir = make_temp_dir("malformed");
    CHECK_THROWS_AS(load_manifest(dir / "missing.jsonl"), std::runtime_error);

    fs::path bad = dir / "bad.jsonl";
    std::ofstream(bad) << "{\"repo\": \"x\"}\n";  // missing required fields
    CHECK_THROWS_WITH_AS(load_manifest(bad), doctest::Contains(":1:"), std::runtime_error);

    fs::path garbage = dir / "garbage.jsonl";
    std::ofstream(garbage) << "\n\nnot json\n";
    CHECK_THROWS_WITH_AS(load_manifest(garbage), doctest::Contains(":3:"), std::runtime_error);

    fs::path empty = dir / "empty.jsonl";
    std::ofstream(empty) << "\n";
    CHECK(load_manifest(empty).problems.empty());
    std::error_code ec;
    fs::remove_all(dir, ec);
}

TEST_CASE("classes with nothing eligible are skipped and counted") {
    fs::path dir = make_temp_dir("tiny");
    std::ofstream(dir / "Tiny.java") << "public class Tiny {\n"
                                        "    int half() { return 1; }\n"
                                        "}\n";
    RepositoryIndex index = build_index(dir, {});
    BenchmarkManifest m = mine_problems(index, dir, {}, 3);
    CHECK(m.problems.empty());
    CHECK(m.stats.too_short == 1);
    CHECK(m.stats.selected == 0);
    CHECK(m.stats.classes_without_eligible == 1);
    CHECK(stats_sum(m.stats) == m.stats.candidates);
    std::error_code ec;
    fs::remove_all(dir, ec);
}

TEST_CASE("left context clips to the configured number of non-blank lines") {
    fs::path dir = make_temp_dir("clip");
    std::ostringstream src;
    src << "public class Wide {\n";
    for (int i = 0; i < 60; ++i) src << "    private int field" << i << ";\n";
    src << "\n    public int tally(int n) {\n"
           "        int total = 0;\n"
           "        total += n;\n"
           "        return total;\n"
           "    }\n}\n";
    std::ofstream(dir / "Wide.java") << src.str();

    RepositoryIndex index = build_index(dir, {});
    MinerConfig cfg;
    cfg.context_lines = 50;
    BenchmarkManifest m = mine_problems(index, dir, cfg, 1);
    REQUIRE(m.problems.size() == 1);
    CHECK(non_blank_lines(m.problems[0].left_context) == 50);
    // the clip keeps the nearest lines: the last field survives, early ones go
    CHECK(m.problems[0].left_context.find("field59") != std::string::npos);
    CHECK(m.problems[0].left_context.find("field5;") == std::string::npos);

    MinerConfig narrow;
    narrow.context_lines = 5;
    BenchmarkManifest m2 = mine_problems(index, dir, narrow, 1);
    REQUIRE(m2.problems.size() == 1);
    CHECK(non_blank_lines(m2.problems[0].left_context) == 5);
    std::error_code ec;
    fs::remove_all(dir, ec);
}
