#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "repofill/java_lexer.hpp"

namespace repofill {

/// One reference found inside a statement block.
struct ScanHit {
    std::string name;
    int arity = -1;  // calls only
    std::size_t byte = 0;
    std::size_t end_byte = 0;
    int line = 1;
};

struct BodyScan {
    std::vector<ScanHit> calls;
    std::vector<ScanHit> field_reads;
    std::vector<ScanHit> type_uses;
    bool balanced = true;  // braces matched within the scanned range
};

/// Walks the token range [begin, end) of a statement block and extracts
/// call sites, field-style reads, and type mentions, excluding locals
/// declared in the block and the names passed in `seed_locals` (params).
///
/// Purely syntactic: lowercase chain heads that aren't locals count as
/// field reads, capitalized heads as type uses, ALL_CAPS as constant
/// (field) reads; members after '.' are fields unless called or
/// capitalized. Never throws.
BodyScan scan_java_statements(const std::vector<JavaToken>& toks, std::size_t begin,
                              std::size_t end, const std::vector<std::string>& seed_locals);

}  // namespace repofill
