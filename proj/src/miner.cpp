#include "repofill/miner.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "repofill/java_lexer.hpp"
#include "repofill/text.hpp"

namespace repofill {

namespace {

using nlohmann::json;

std::set<std::string> owner_field_names(const MethodDecl& m, const RepositoryIndex& index) {
    std::set<std::string> names;
    for (const FieldDecl& f : index.fields)
        if (f.owner_class == m.owner_class) names.insert(f.simple_name);
    return names;
}

/// Body tokens with the enclosing brace pair removed.
std::vector<JavaToken> inner_tokens(const std::string& body) {
    LexResult lex = lex_java(body);
    auto toks = std::move(lex.tokens);
    if (toks.size() >= 2 && toks.front().kind == JTok::punct && toks.front().text == "{" &&
        toks.back().kind == JTok::punct && toks.back().text == "}") {
        toks.erase(toks.begin());
        toks.pop_back();
    }
    return toks;
}

bool tok_is(const JavaToken& t, JTok kind, std::string_view text) {
    return t.kind == kind && t.text == text;
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (true) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.emplace_back(text.substr(start));
            break;
        }
        lines.emplace_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

std::string join_lines(const std::vector<std::string>& lines, std::size_t lo, std::size_t hi) {
    std::string out;
    for (std::size_t i = lo; i < hi; ++i) {
        if (i > lo) out += '\n';
        out += lines[i];
    }
    return out;
}

bool is_import_line(const std::string& line) {
    std::size_t i = line.find_first_not_of(" \t");
    if (i == std::string::npos) return false;
    if (line.compare(i, 6, "import") != 0) return false;
    char after = i + 6 < line.size() ? line[i + 6] : ' ';
    return after == ' ' || after == '\t';
}

/// Last `keep` non-blank lines of the text (blank lines in between stay).
std::string clip_tail(const std::string& text, std::size_t keep) {
    auto lines = split_lines(text);
    std::size_t non_blank = 0;
    std::size_t lo = 0;
    for (std::size_t i = lines.size(); i-- > 0;) {
        if (!is_blank_line(lines[i]) && ++non_blank == keep) {
            lo = i;
            break;
        }
    }
    return join_lines(lines, lo, lines.size());
}

/// First `keep` non-blank lines of the text.
std::string clip_head(const std::string& text, std::size_t keep) {
    auto lines = split_lines(text);
    std::size_t non_blank = 0;
    std::size_t hi = lines.size();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (!is_blank_line(lines[i]) && ++non_blank == keep) {
            hi = i + 1;
            break;
        }
    }
    return join_lines(lines, 0, hi);
}

std::string strip_import_lines(const std::string& text) {
    auto lines = split_lines(text);
    std::vector<std::string> kept;
    for (auto& line : lines)
        if (!is_import_line(line)) kept.push_back(std::move(line));
    return join_lines(kept, 0, kept.size());
}

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read source file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string repo_name(const std::filesystem::path& root) {
    std::filesystem::path normal = root.lexically_normal();
    std::string name = normal.filename().string();
    if (name.empty() || name == ".")
        name = normal.parent_path().filename().string();
    return name.empty() ? normal.string() : name;
}

}  // namespace

bool is_trivial_getter(const MethodDecl& m, const RepositoryIndex& index) {
    if (!m.body_text) return false;
    auto toks = inner_tokens(*m.body_text);
    std::string field;
    if (toks.size() == 3 && tok_is(toks[0], JTok::keyword, "return") &&
        toks[1].kind == JTok::ident && tok_is(toks[2], JTok::punct, ";")) {
        field = std::string(toks[1].text);
    } else if (toks.size() == 5 && tok_is(toks[0], JTok::keyword, "return") &&
               tok_is(toks[1], JTok::keyword, "this") && tok_is(toks[2], JTok::punct, ".") &&
               toks[3].kind == JTok::ident && tok_is(toks[4], JTok::punct, ";")) {
        field = std::string(toks[3].text);
    } else {
        return false;
    }
    return owner_field_names(m, index).count(field) != 0;
}

bool is_trivial_setter(const MethodDecl& m, const RepositoryIndex& index) {
    if (!m.body_text) return false;
    auto toks = inner_tokens(*m.body_text);
    if (toks.size() != 6 || !tok_is(toks[0], JTok::keyword, "this") ||
        !tok_is(toks[1], JTok::punct, ".") || toks[2].kind != JTok::ident ||
        !tok_is(toks[3], JTok::punct, "=") || toks[4].kind != JTok::ident ||
        !tok_is(toks[5], JTok::punct, ";"))
        return false;
    if (owner_field_names(m, index).count(std::string(toks[2].text)) == 0) return false;
    for (const auto& [type, name] : m.params)
        if (name == toks[4].text) return true;
    return false;
}

BenchmarkManifest mine_problems(const RepositoryIndex& index,
                                const std::filesystem::path& root, const MinerConfig& cfg,
                                std::uint64_t rng_seed) {
    BenchmarkManifest manifest;
    manifest.repo = repo_name(root);
    manifest.snapshot_id = index.snapshot_id;
    manifest.method_count = index.methods.size();
    {
        std::set<std::string> files;
        for (const auto& c : index.classes) files.insert(c.span.file_path);
        for (const auto& m : index.methods) files.insert(m.span.file_path);
        for (const auto& f : index.fields) files.insert(f.span.file_path);
        manifest.file_count = files.size();
    }

    std::map<std::string, std::vector<const MethodDecl*>> by_owner;
    for (const MethodDecl* m : accessible_methods(index)) by_owner[m->owner_class].push_back(m);

    std::mt19937 rng(static_cast<std::uint32_t>(rng_seed));
    std::map<std::string, std::string> file_cache;
    auto content_of = [&](const std::string& rel) -> const std::string& {
        auto it = file_cache.find(rel);
        if (it == file_cache.end())
            it = file_cache.emplace(rel, read_file(root / rel)).first;
        return it->second;
    };

    FilterStats& stats = manifest.stats;
    for (const ClassDecl* cls : accessible_classes(index)) {
        std::vector<const MethodDecl*> eligible;
        auto it = by_owner.find(cls->qualified_name);
        if (it != by_owner.end()) {
            for (const MethodDecl* m : it->second) {
                ++stats.candidates;
                if (!m->body_text) {
                    ++stats.no_body;
                } else if (m->is_ctor) {
                    ++stats.constructors;
                } else if (is_trivial_getter(*m, index)) {
                    ++stats.getters;
                } else if (is_trivial_setter(*m, index)) {
                    ++stats.setters;
                } else if (m->body_loc < cfg.min_body_lines) {
                    ++stats.too_short;
                } else {
                    eligible.push_back(m);
                }
            }
        }
        if (eligible.empty()) {
            ++stats.classes_without_eligible;
            continue;
        }
        std::size_t pick = rng() % eligible.size();
        ++stats.selected;
        stats.eligible_not_sampled += eligible.size() - 1;

        const MethodDecl& m = *eligible[pick];
        const std::string& content = content_of(m.span.file_path);

        MbcProblem p;
        p.repo_root = root.string();
        p.file_path = m.span.file_path;
        p.signature_text =
            trim(std::string_view(content).substr(m.span.start_byte,
                                                  m.body_span.start_byte - m.span.start_byte));
        std::string left_raw =
            normalize_newlines(std::string_view(content).substr(0, m.span.start_byte));
        p.left_context = clip_tail(strip_import_lines(left_raw), cfg.context_lines);
        std::string right_raw =
            normalize_newlines(std::string_view(content).substr(m.body_span.end_byte));
        p.right_context = clip_head(right_raw, cfg.context_lines);
        p.reference_body = m.body_text;
        p.body_start = m.body_span;
        manifest.problems.push_back(std::move(p));
    }
    return manifest;
}

void save_manifest(const BenchmarkManifest& manifest, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write manifest: " + path.string());
    for (const MbcProblem& p : manifest.problems) {
        json record{
            {"repo", manifest.repo},
            {"path", p.file_path},
            {"signature", p.signature_text},
            {"left_context", p.left_context},
            {"right_context", p.right_context},
            {"span",
             {{"start_line", p.body_start.start_line},
              {"end_line", p.body_start.end_line},
              {"start_byte", p.body_start.start_byte},
              {"end_byte", p.body_start.end_byte}}},
        };
        if (p.reference_body)
            record["reference_body"] = *p.reference_body;
        else
            record["reference_body"] = nullptr;
        out << record.dump() << '\n';
    }
}

BenchmarkManifest load_manifest(const std::filesystem::path& path, const std::string& repo_root) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read manifest: " + path.string());
    BenchmarkManifest manifest;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json record;
        try {
            record = json::parse(line);
            MbcProblem p;
            p.repo_root = repo_root;
            p.file_path = record.at("path").get<std::string>();
            p.signature_text = record.at("signature").get<std::string>();
            p.left_context = record.at("left_context").get<std::string>();
            p.right_context = record.at("right_context").get<std::string>();
            const json& body = record.at("reference_body");
            if (!body.is_null()) p.reference_body = body.get<std::string>();
            const json& span = record.at("span");
            p.body_start.file_path = p.file_path;
            p.body_start.start_line = span.at("start_line").get<int>();
            p.body_start.end_line = span.at("end_line").get<int>();
            p.body_start.start_byte = span.at("start_byte").get<std::size_t>();
            p.body_start.end_byte = span.at("end_byte").get<std::size_t>();
            if (manifest.repo.empty()) manifest.repo = record.at("repo").get<std::string>();
            manifest.problems.push_back(std::move(p));
        } catch (const json::exception& e) {
            throw std::runtime_error("malformed manifest record at " + path.string() + ":" +
                                     std::to_string(line_no) + ": " + e.what());
        }
    }
    return manifest;
}

}  // namespace repofill
