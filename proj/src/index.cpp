#include "repofill/index.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "repofill/text.hpp"

namespace repofill {

std::string signature_text(const MethodDecl& m) {
    std::string sig = m.return_type.empty() ? m.simple_name : m.return_type + " " + m.simple_name;
    sig += "(";
    for (std::size_t i = 0; i < m.params.size(); ++i) {
        if (i) sig += ",";
        sig += m.params[i].first;
    }
    sig += ")";
    return sig;
}

std::string to_string(UsageKind k) {
    switch (k) {
        case UsageKind::call: return "call";
        case UsageKind::field_access: return "field_access";
        case UsageKind::type_use: return "type_use";
    }
    return "call";
}

UsageKind usage_kind_from_string(std::string_view s) {
    if (s == "call") return UsageKind::call;
    if (s == "field_access") return UsageKind::field_access;
    if (s == "type_use") return UsageKind::type_use;
    throw std::invalid_argument("unknown usage kind: " + std::string(s));
}

namespace {

template <typename T>
const T* find_by_qualified(const std::vector<T>& items, std::string_view qualified) {
    auto it = std::lower_bound(items.begin(), items.end(), qualified,
                               [](const T& a, std::string_view q) { return a.qualified_name < q; });
    if (it != items.end() && it->qualified_name == qualified) return &*it;
    return nullptr;
}

bool matches_any(const std::vector<std::string>& globs, const std::string& path) {
    for (const auto& g : globs)
        if (glob_match(g, path)) return true;
    return false;
}

void sort_index(RepositoryIndex& idx) {
    auto by_name = [](const auto& a, const auto& b) { return a.qualified_name < b.qualified_name; };
    std::sort(idx.classes.begin(), idx.classes.end(), by_name);
    std::sort(idx.methods.begin(), idx.methods.end(), by_name);
    std::sort(idx.fields.begin(), idx.fields.end(), by_name);
    std::sort(idx.usage_edges.begin(), idx.usage_edges.end(),
              [](const UsageEdge& a, const UsageEdge& b) {
                  if (a.user != b.user) return a.user < b.user;
                  if (a.site.file_path != b.site.file_path)
                      return a.site.file_path < b.site.file_path;
                  if (a.site.start_byte != b.site.start_byte)
                      return a.site.start_byte < b.site.start_byte;
                  return to_string(a.kind) < to_string(b.kind);
              });
}

void build_lookup(RepositoryIndex& idx) {
    idx.by_simple_name.clear();
    for (const auto& c : idx.classes)
        idx.by_simple_name[c.simple_name].push_back({ElementKind::klass, c.qualified_name});
    for (const auto& m : idx.methods)
        idx.by_simple_name[m.simple_name].push_back({ElementKind::method, m.qualified_name});
    for (const auto& f : idx.fields)
        idx.by_simple_name[f.simple_name].push_back({ElementKind::field, f.qualified_name});
}

}  // namespace

const MethodDecl* RepositoryIndex::find_method(std::string_view qualified) const {
    return find_by_qualified(methods, qualified);
}
const FieldDecl* RepositoryIndex::find_field(std::string_view qualified) const {
    return find_by_qualified(fields, qualified);
}
const ClassDecl* RepositoryIndex::find_class(std::string_view qualified) const {
    return find_by_qualified(classes, qualified);
}

RepositoryIndex build_index(const std::filesystem::path& root, const IndexConfig& config) {
    namespace fs = std::filesystem;
    const LanguageFrontend& frontend = frontend_by_name(config.frontend);

    if (!fs::exists(root)) throw std::runtime_error("index root does not exist: " + root.string());

    std::vector<std::string> paths;
    for (auto it = fs::recursive_directory_iterator(
             root, fs::directory_options::skip_permission_denied);
         it != fs::recursive_directory_iterator(); ++it) {
        if (!it->is_regular_file()) continue;
        std::string rel = fs::relative(it->path(), root).generic_string();
        if (!frontend.handles(rel)) continue;
        if (!config.include_globs.empty() && !matches_any(config.include_globs, rel)) continue;
        if (matches_any(config.exclude_globs, rel)) continue;
        paths.push_back(std::move(rel));
    }
    std::sort(paths.begin(), paths.end());

    RepositoryIndex idx;
    struct ParsedFile {
        std::string path;
        FileDecls decls;
    };
    std::vector<ParsedFile> parsed;
    std::uint64_t snapshot = 0xcbf29ce484222325ULL;
    std::size_t parsable = 0;

    for (const auto& rel : paths) {
        std::ifstream in(root / rel, std::ios::binary);
        if (!in) {
            idx.warnings.push_back(rel + ": unreadable, skipped");
            continue;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        std::string content = buf.str();
        snapshot = fnv1a64(rel, snapshot);
        snapshot = fnv1a64(std::string_view("\0", 1), snapshot);
        snapshot = fnv1a64(content, snapshot);
        snapshot = fnv1a64(std::string_view("\0", 1), snapshot);

        bool is_test = matches_any(config.test_globs, rel);
        parsed.push_back({rel, frontend.parse_file(content, rel, is_test)});
        ++parsable;
    }
    if (parsable == 0) throw std::runtime_error("empty index");
    idx.snapshot_id = to_hex(snapshot);

    // duplicate class names across files get a path-hash suffix
    std::map<std::string, int> class_counts;
    for (const auto& pf : parsed)
        for (const auto& c : pf.decls.classes) ++class_counts[c.qualified_name];

    for (auto& pf : parsed) {
        std::map<std::string, std::string> rename;  // old class qname -> new
        std::string suffix = "#" + to_hex(fnv1a64(pf.path)).substr(0, 8);
        for (auto& c : pf.decls.classes) {
            if (class_counts[c.qualified_name] > 1) {
                std::string renamed = c.qualified_name + suffix;
                rename[c.qualified_name] = renamed;
                c.qualified_name = renamed;
            }
        }
        auto fix_owner = [&](std::string& owner, std::string& qualified) {
            auto it = rename.find(owner);
            if (it == rename.end()) return;
            std::string tail = qualified.substr(owner.size());
            owner = it->second;
            qualified = owner + tail;
        };
        std::map<std::string, std::string> method_rename;
        for (auto& m : pf.decls.methods) {
            std::string old = m.qualified_name;
            fix_owner(m.owner_class, m.qualified_name);
            if (m.qualified_name != old) method_rename[old] = m.qualified_name;
        }
        for (auto& f : pf.decls.fields) fix_owner(f.owner_class, f.qualified_name);
        for (auto& e : pf.decls.usage_edges) {
            auto it = method_rename.find(e.user);
            if (it != method_rename.end()) e.user = it->second;
        }

        std::move(pf.decls.classes.begin(), pf.decls.classes.end(),
                  std::back_inserter(idx.classes));
        std::move(pf.decls.methods.begin(), pf.decls.methods.end(),
                  std::back_inserter(idx.methods));
        std::move(pf.decls.fields.begin(), pf.decls.fields.end(), std::back_inserter(idx.fields));
        std::move(pf.decls.usage_edges.begin(), pf.decls.usage_edges.end(),
                  std::back_inserter(idx.usage_edges));
        std::move(pf.decls.warnings.begin(), pf.decls.warnings.end(),
                  std::back_inserter(idx.warnings));
    }

    // same-signature collisions within one class (broken sources) get a
    // position suffix so index keys stay unique
    std::map<std::string, int> method_counts;
    for (const auto& m : idx.methods) ++method_counts[m.qualified_name];
    struct MethodRename {
        std::string base;
        std::string file;
        std::size_t start;
        std::string renamed;
    };
    std::vector<MethodRename> method_renames;
    for (auto& m : idx.methods) {
        if (method_counts[m.qualified_name] > 1) {
            std::string renamed = m.qualified_name + "#" +
                                  to_hex(fnv1a64(m.span.file_path + ":" +
                                                 std::to_string(m.span.start_byte)))
                                      .substr(0, 8);
            method_renames.push_back(
                {m.qualified_name, m.span.file_path, m.span.start_byte, renamed});
            m.qualified_name = renamed;
        }
    }
    if (!method_renames.empty()) {
        // edges from renamed methods were emitted under the shared name;
        // re-attribute each to the copy whose span starts closest before it
        for (auto& e : idx.usage_edges) {
            const MethodRename* best = nullptr;
            for (const auto& r : method_renames) {
                if (e.user != r.base || e.site.file_path != r.file) continue;
                if (e.site.start_byte < r.start) continue;
                if (!best || r.start > best->start) best = &r;
            }
            if (best) e.user = best->renamed;
        }
    }

    sort_index(idx);
    std::sort(idx.warnings.begin(), idx.warnings.end());
    build_lookup(idx);
    return idx;
}

std::vector<const MethodDecl*> accessible_methods(const RepositoryIndex& index) {
    std::vector<const MethodDecl*> out;
    for (const auto& m : index.methods)
        if (!m.is_test) out.push_back(&m);
    return out;
}

std::vector<const FieldDecl*> accessible_fields(const RepositoryIndex& index) {
    std::vector<const FieldDecl*> out;
    for (const auto& f : index.fields)
        if (!f.is_test) out.push_back(&f);
    return out;
}

std::vector<const ClassDecl*> accessible_classes(const RepositoryIndex& index) {
    std::vector<const ClassDecl*> out;
    for (const auto& c : index.classes)
        if (!c.is_test) out.push_back(&c);
    return out;
}

std::vector<const MethodDecl*> usages_of(const RepositoryIndex& index, const ElementRef& element) {
    std::string simple;
    std::size_t method_params = 0;
    UsageKind want = UsageKind::call;
    switch (element.kind) {
        case ElementKind::method: {
            const MethodDecl* m = index.find_method(element.qualified_name);
            if (!m) throw std::invalid_argument("unknown element: " + element.qualified_name);
            simple = m->simple_name;
            method_params = m->params.size();
            want = UsageKind::call;
            break;
        }
        case ElementKind::field: {
            const FieldDecl* f = index.find_field(element.qualified_name);
            if (!f) throw std::invalid_argument("unknown element: " + element.qualified_name);
            simple = f->simple_name;
            want = UsageKind::field_access;
            break;
        }
        case ElementKind::klass: {
            const ClassDecl* c = index.find_class(element.qualified_name);
            if (!c) throw std::invalid_argument("unknown element: " + element.qualified_name);
            simple = c->simple_name;
            want = UsageKind::type_use;
            break;
        }
    }

    bool unique_name = false;
    if (element.kind == ElementKind::method) {
        int share = 0;
        auto it = index.by_simple_name.find(simple);
        if (it != index.by_simple_name.end())
            for (const auto& ref : it->second)
                if (ref.kind == ElementKind::method) ++share;
        unique_name = share == 1;
    }

    std::vector<const MethodDecl*> out;
    std::string last_user;
    for (const auto& e : index.usage_edges) {
        if (e.kind != want || e.target_simple_name != simple) continue;
        if (element.kind == ElementKind::method && !unique_name &&
            e.arg_count != static_cast<int>(method_params))
            continue;
        if (e.user == last_user) continue;  // edges are sorted by user
        const MethodDecl* user = index.find_method(e.user);
        if (!user || user->is_test) continue;
        last_user = e.user;
        if (std::find(out.begin(), out.end(), user) == out.end()) out.push_back(user);
    }
    std::sort(out.begin(), out.end(), [](const MethodDecl* a, const MethodDecl* b) {
        return a->qualified_name < b->qualified_name;
    });
    return out;
}

// --- persistence ------------------------------------------------------------

namespace {

using ordered_json = nlohmann::ordered_json;
constexpr const char* kSchema = "repofill-index/1";

ordered_json span_to_json(const SourceSpan& s) {
    return ordered_json{{"file", s.file_path},
                        {"start_line", s.start_line},
                        {"end_line", s.end_line},
                        {"start_byte", s.start_byte},
                        {"end_byte", s.end_byte}};
}

SourceSpan span_from_json(const ordered_json& j) {
    SourceSpan s;
    s.file_path = j.at("file").get<std::string>();
    s.start_line = j.at("start_line").get<int>();
    s.end_line = j.at("end_line").get<int>();
    s.start_byte = j.at("start_byte").get<std::size_t>();
    s.end_byte = j.at("end_byte").get<std::size_t>();
    return s;
}

}  // namespace

void save_index(const RepositoryIndex& index, const std::filesystem::path& path) {
    ordered_json j;
    j["schema"] = kSchema;
    j["snapshot_id"] = index.snapshot_id;
    j["classes"] = ordered_json::array();
    for (const auto& c : index.classes)
        j["classes"].push_back(ordered_json{{"qualified_name", c.qualified_name},
                                            {"simple_name", c.simple_name},
                                            {"span", span_to_json(c.span)},
                                            {"is_test", c.is_test}});
    j["methods"] = ordered_json::array();
    for (const auto& m : index.methods) {
        ordered_json pj = ordered_json::array();
        for (const auto& [t, n] : m.params) pj.push_back(ordered_json{{"type", t}, {"name", n}});
        ordered_json mj{{"qualified_name", m.qualified_name},
                        {"simple_name", m.simple_name},
                        {"owner_class", m.owner_class},
                        {"return_type", m.return_type},
                        {"params", pj},
                        {"body_loc", m.body_loc},
                        {"span", span_to_json(m.span)},
                        {"is_test", m.is_test},
                        {"is_ctor", m.is_ctor}};
        if (m.body_text) {
            mj["body_text"] = *m.body_text;
            mj["body_span"] = span_to_json(m.body_span);
        }
        j["methods"].push_back(std::move(mj));
    }
    j["fields"] = ordered_json::array();
    for (const auto& f : index.fields)
        j["fields"].push_back(ordered_json{{"qualified_name", f.qualified_name},
                                           {"simple_name", f.simple_name},
                                           {"owner_class", f.owner_class},
                                           {"type_name", f.type_name},
                                           {"span", span_to_json(f.span)},
                                           {"is_test", f.is_test}});
    j["usage_edges"] = ordered_json::array();
    for (const auto& e : index.usage_edges)
        j["usage_edges"].push_back(ordered_json{{"user", e.user},
                                                {"kind", to_string(e.kind)},
                                                {"target", e.target_simple_name},
                                                {"arg_count", e.arg_count},
                                                {"site", span_to_json(e.site)}});
    j["warnings"] = index.warnings;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write index file: " + path.string());
    out << j.dump(1, '\t') << "\n";
}

RepositoryIndex load_index(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read index file: " + path.string());
    ordered_json j = ordered_json::parse(in, nullptr, true);
    if (!j.contains("schema") || j["schema"].get<std::string>() != kSchema)
        throw std::runtime_error("unsupported index schema");

    RepositoryIndex idx;
    idx.snapshot_id = j.at("snapshot_id").get<std::string>();
    for (const auto& cj : j.at("classes")) {
        ClassDecl c;
        c.qualified_name = cj.at("qualified_name").get<std::string>();
        c.simple_name = cj.at("simple_name").get<std::string>();
        c.span = span_from_json(cj.at("span"));
        c.is_test = cj.at("is_test").get<bool>();
        idx.classes.push_back(std::move(c));
    }
    for (const auto& mj : j.at("methods")) {
        MethodDecl m;
        m.qualified_name = mj.at("qualified_name").get<std::string>();
        m.simple_name = mj.at("simple_name").get<std::string>();
        m.owner_class = mj.at("owner_class").get<std::string>();
        m.return_type = mj.at("return_type").get<std::string>();
        for (const auto& pj : mj.at("params"))
            m.params.emplace_back(pj.at("type").get<std::string>(),
                                  pj.at("name").get<std::string>());
        m.body_loc = mj.at("body_loc").get<std::size_t>();
        m.span = span_from_json(mj.at("span"));
        m.is_test = mj.at("is_test").get<bool>();
        m.is_ctor = mj.at("is_ctor").get<bool>();
        if (mj.contains("body_text")) {
            m.body_text = mj.at("body_text").get<std::string>();
            m.body_span = span_from_json(mj.at("body_span"));
        }
        idx.methods.push_back(std::move(m));
    }
    for (const auto& fj : j.at("fields")) {
        FieldDecl f;
        f.qualified_name = fj.at("qualified_name").get<std::string>();
        f.simple_name = fj.at("simple_name").get<std::string>();
        f.owner_class = fj.at("owner_class").get<std::string>();
        f.type_name = fj.at("type_name").get<std::string>();
        f.span = span_from_json(fj.at("span"));
        f.is_test = fj.at("is_test").get<bool>();
        idx.fields.push_back(std::move(f));
    }
    for (const auto& ej : j.at("usage_edges")) {
        UsageEdge e;
        e.user = ej.at("user").get<std::string>();
        e.kind = usage_kind_from_string(ej.at("kind").get<std::string>());
        e.target_simple_name = ej.at("target").get<std::string>();
        e.arg_count = ej.at("arg_count").get<int>();
        e.site = span_from_json(ej.at("site"));
        idx.usage_edges.push_back(std::move(e));
    }
    if (j.contains("warnings"))
        idx.warnings = j.at("warnings").get<std::vector<std::string>>();

    build_lookup(idx);
    return idx;
}

}  // namespace repofill
