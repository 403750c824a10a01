#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace repofill {

struct SourceSpan {
    std::string file_path;  // repo-relative, '/' separators
    int start_line = 1;     // 1-based
    int end_line = 1;
    std::size_t start_byte = 0;
    std::size_t end_byte = 0;
};

struct ClassDecl {
    std::string qualified_name;  // dotted; may carry a #hash suffix on collision
    std::string simple_name;
    SourceSpan span;
    bool is_test = false;
};

struct MethodDecl {
    std::string qualified_name;  // Owner.name(paramType,paramType)
    std::string simple_name;
    std::string owner_class;
    std::string return_type;  // empty for constructors
    std::vector<std::pair<std::string, std::string>> params;  // (type text, name)
    std::optional<std::string> body_text;  // verbatim incl. outer braces; absent if abstract
    std::size_t body_loc = 0;              // non-blank lines of body_text
    SourceSpan span;                       // whole declaration
    SourceSpan body_span;                  // braces only; valid when body_text present
    bool is_test = false;
    bool is_ctor = false;
};

/// `return_type simple_name(paramType,paramType)` — the retrieval key for
/// signature similarity.
std::string signature_text(const MethodDecl& m);

struct FieldDecl {
    std::string qualified_name;  // Owner.name
    std::string simple_name;
    std::string owner_class;
    std::string type_name;
    SourceSpan span;
    bool is_test = false;
};

enum class UsageKind { call, field_access, type_use };

std::string to_string(UsageKind k);
UsageKind usage_kind_from_string(std::string_view s);

struct UsageEdge {
    std::string user;  // qualified name of the method whose body holds the site
    UsageKind kind = UsageKind::call;
    std::string target_simple_name;
    int arg_count = -1;  // calls only
    SourceSpan site;     // the target token itself
};

enum class ElementKind { method, field, klass };

/// Pointer into one of the index element lists.
struct ElementRef {
    ElementKind kind = ElementKind::method;
    std::string qualified_name;
};

struct RepositoryIndex {
    std::vector<ClassDecl> classes;  // sorted by qualified_name
    std::vector<MethodDecl> methods;
    std::vector<FieldDecl> fields;
    std::vector<UsageEdge> usage_edges;
    std::string snapshot_id;  // content hash over indexed files
    std::vector<std::string> warnings;

    // identifier -> refs, rebuilt after load; not serialized
    std::map<std::string, std::vector<ElementRef>> by_simple_name;

    const MethodDecl* find_method(std::string_view qualified) const;
    const FieldDecl* find_field(std::string_view qualified) const;
    const ClassDecl* find_class(std::string_view qualified) const;
};

struct IndexConfig {
    std::string frontend = "java";
    std::vector<std::string> include_globs;  // empty = everything the frontend handles
    std::vector<std::string> exclude_globs;
    std::vector<std::string> test_globs = {"**/test/**", "**/tests/**", "*Test.*"};
};

/// Per-file parse output, paths still unqualified across files.
struct FileDecls {
    std::vector<ClassDecl> classes;
    std::vector<MethodDecl> methods;
    std::vector<FieldDecl> fields;
    std::vector<UsageEdge> usage_edges;
    std::vector<std::string> warnings;
};

class LanguageFrontend {
public:
    virtual ~LanguageFrontend() = default;
    virtual std::string name() const = 0;
    virtual bool handles(const std::string& repo_path) const = 0;
    virtual FileDecls parse_file(std::string_view source, const std::string& repo_path,
                                 bool is_test) const = 0;
};

/// Registry lookup; throws std::invalid_argument for unknown names.
const LanguageFrontend& frontend_by_name(const std::string& name);

/// Walks `root`, parses every file the frontend accepts (modulo globs) and
/// assembles the immutable catalog. Unreadable files become warnings; zero
/// parsable files is an error ("empty index").
RepositoryIndex build_index(const std::filesystem::path& root, const IndexConfig& config);

// med(R) / fid(R) / cls(R): non-test declarations, sorted by qualified_name.
std::vector<const MethodDecl*> accessible_methods(const RepositoryIndex& index);
std::vector<const FieldDecl*> accessible_fields(const RepositoryIndex& index);
std::vector<const ClassDecl*> accessible_classes(const RepositoryIndex& index);

/// Non-test methods whose bodies reference `element` (kind-matched by
/// simple name; calls also match arity, relaxed when the name is unique).
/// Deduplicated, sorted by qualified_name. Throws "unknown element" if the
/// ref is not in the index.
std::vector<const MethodDecl*> usages_of(const RepositoryIndex& index, const ElementRef& element);

/// Versioned single-file persistence.
void save_index(const RepositoryIndex& index, const std::filesystem::path& path);
RepositoryIndex load_index(const std::filesystem::path& path);

}  // namespace repofill
