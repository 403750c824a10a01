#include <doctest.h>

#include "repofill/text.hpp"

using namespace repofill;

TEST_SUITE("text") {

TEST_CASE("tokenize splits camelCase identifiers") {
    auto bag = tokenize("getUserById");
    CHECK(bag.tokens == std::vector<std::string>{"by", "get", "id", "user"});
    CHECK(bag.source_len == 4);
}

TEST_CASE("tokenize of empty text is empty") {
    auto bag = tokenize("");
    CHECK(bag.tokens.empty());
    CHECK(bag.empty());
    CHECK(bag.source_len == 0);
}

TEST_CASE("tokenize splits code expressions on punctuation") {
    auto bag = tokenize("Mono.error(new NotFoundException())");
    CHECK(bag.tokens ==
          std::vector<std::string>{"error", "exception", "found", "mono", "new", "not"});
}

TEST_CASE("tokenize handles upper runs, digits and underscores") {
    CHECK(tokenize_sequence("XMLHttpRequest") ==
          std::vector<std::string>{"xml", "http", "request"});
    CHECK(tokenize_sequence("parse2Json") == std::vector<std::string>{"parse", "2", "json"});
    CHECK(tokenize_sequence("snake_case_name") ==
          std::vector<std::string>{"snake", "case", "name"});
    CHECK(tokenize_sequence("MAX_VALUE") == std::vector<std::string>{"max", "value"});
    CHECK(tokenize_sequence("utf8Decoder") == std::vector<std::string>{"utf", "8", "decoder"});
}

TEST_CASE("tokenize_sequence keeps duplicates and order") {
    CHECK(tokenize_sequence("a.b(a)") == std::vector<std::string>{"a", "b", "a"});
    CHECK(token_count("a.b(a)") == 3);
}

TEST_CASE("jaccard basics") {
    TokenBag ab{{"a", "b"}, 2};
    TokenBag bc{{"b", "c"}, 2};
    TokenBag empty;
    CHECK(jaccard(ab, ab) == doctest::Approx(1.0));
    CHECK(jaccard(ab, bc) == doctest::Approx(1.0 / 3.0));
    CHECK(jaccard(ab, TokenBag{{"c", "d"}, 2}) == doctest::Approx(0.0));
    CHECK(jaccard(empty, empty) == doctest::Approx(1.0));
    CHECK(jaccard(ab, empty) == doctest::Approx(0.0));
    CHECK(jaccard(ab, bc) == jaccard(bc, ab));
}

TEST_CASE("tokenizer idempotence over alphanumeric tokens") {
    auto bag = tokenize("computeRouteDefinitionLocator");
    std::string joined;
    for (const auto& t : bag.tokens) joined += t + " ";
    auto rebag = tokenize(joined);
    for (const auto& t : bag.tokens) CHECK(rebag.contains(t));
}

TEST_CASE("fnv1a64 is stable") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(to_hex(0xaf63dc4c8601ec8cULL) == "af63dc4c8601ec8c");
}

TEST_CASE("newline normalization") {
    CHECK(normalize_newlines("a\r\nb\rc\n") == "a\nb\nc\n");
}

TEST_CASE("split_lines keeps trailing empties explicit") {
    auto lines = split_lines("a\nb\n");
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "a");
    CHECK(lines[1] == "b");
    CHECK(lines[2] == "");
}

TEST_CASE("blank line detection") {
    CHECK(is_blank_line(""));
    CHECK(is_blank_line("  \t "));
    CHECK_FALSE(is_blank_line(" x "));
}

TEST_CASE("glob matching") {
    CHECK(glob_match("*.java", "src/Main.java"));
    CHECK(glob_match("*Test.*", "src/FooTest.java"));
    CHECK_FALSE(glob_match("*Test.*", "src/TestUtil.java"));
    CHECK(glob_match("**/test/**", "a/b/test/c/D.java"));
    CHECK_FALSE(glob_match("**/test/**", "a/b/testing/D.java"));
    CHECK(glob_match("src/**/*.java", "src/a/b/C.java"));
    CHECK(glob_match("src/*.java", "src/C.java"));
    CHECK_FALSE(glob_match("src/*.java", "src/a/C.java"));
    CHECK(glob_match("?.java", "x/A.java"));
}

}  // TEST_SUITE
