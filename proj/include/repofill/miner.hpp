#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "repofill/index.hpp"
#include "repofill/sketch.hpp"

namespace repofill {

struct MinerConfig {
    std::size_t min_body_lines = 3;  ///< non-blank body lines required
    std::size_t context_lines = 50;  ///< non-blank lines kept per context side
};

/// Why candidate methods were excluded; the method-level buckets plus
/// `selected` and `eligible_not_sampled` always sum to `candidates`.
struct FilterStats {
    std::size_t candidates = 0;  ///< methods of non-test classes examined
    std::size_t selected = 0;
    std::size_t eligible_not_sampled = 0;  ///< eligible, lost the per-class draw
    std::size_t constructors = 0;
    std::size_t getters = 0;
    std::size_t setters = 0;
    std::size_t too_short = 0;
    std::size_t no_body = 0;  ///< abstract/interface declarations
    std::size_t classes_without_eligible = 0;  ///< class-level, outside the sum
};

struct BenchmarkManifest {
    std::string repo;  ///< root directory name
    std::string snapshot_id;
    std::size_t file_count = 0;
    std::size_t method_count = 0;
    FilterStats stats;
    std::vector<MbcProblem> problems;
};

/// True when the body is a single `return <field>;` / `return this.<field>;`
/// statement naming a field of the owner class. Exposed for tests.
bool is_trivial_getter(const MethodDecl& m, const RepositoryIndex& index);

/// True when the body is a single `this.<field> = <param>;` statement with
/// the field on the owner class and the right-hand side one of the method's
/// parameters. Exposed for tests.
bool is_trivial_setter(const MethodDecl& m, const RepositoryIndex& index);

/// Samples one completion problem per non-test class: eligible methods have
/// a body of at least cfg.min_body_lines non-blank lines and are neither
/// constructors nor trivial getters/setters. The pick within each class uses
/// one draw from a mersenne-twister generator seeded with rng_seed, so the
/// same root and seed always yield the same manifest. Problems carry the
/// method header verbatim, the file text before it (imports removed, clipped
/// to the last cfg.context_lines non-blank lines), the file text after the
/// body (clipped likewise from the front), the original body, and its byte
/// span. Throws std::runtime_error when a source file cannot be read back.
BenchmarkManifest mine_problems(const RepositoryIndex& index,
                                const std::filesystem::path& root, const MinerConfig& cfg,
                                std::uint64_t rng_seed);

/// One problem per line as a structured-text record with fields exactly:
/// repo, path, signature, left_context, right_context, reference_body, span.
void save_manifest(const BenchmarkManifest& manifest, const std::filesystem::path& path);

/// Reads problems back; repo metadata and filter stats are not stored in the
/// line records and stay default. `repo_root` is stamped onto every problem
/// (compile checks need it; pass empty when unused). Throws
/// std::runtime_error on unreadable files or malformed records.
BenchmarkManifest load_manifest(const std::filesystem::path& path,
                                const std::string& repo_root = {});

}  // namespace repofill
