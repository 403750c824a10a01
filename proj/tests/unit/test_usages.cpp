#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "repofill/essentials.hpp"
#include "repofill/index.hpp"
#include "repofill/text.hpp"
#include "repofill/usages.hpp"

using namespace repofill;

namespace {

RepositoryIndex mini_index() {
    return build_index(std::string(REPOFILL_FIXTURES) + "/mini", IndexConfig{});
}

/// Standalone method for ranking tests (no index needed).
MethodDecl make_method(std::string qualified, std::string body) {
    MethodDecl m;
    m.qualified_name = std::move(qualified);
    auto dot = m.qualified_name.rfind('.');
    m.simple_name = m.qualified_name.substr(dot + 1);
    m.body_text = std::move(body);
    return m;
}

Sketch make_sketch(std::string body) {
    Sketch s;
    s.body_text = std::move(body);
    s.parse_ok = !s.body_text.empty();
    return s;
}

}  // namespace

TEST_CASE("usage extraction unions the users of every essential element") {
    auto index = mini_index();
    SketchAnalysis a;
    a.accessed_fields.insert("routes");
    auto essentials = identify_essentials(index, a, EeiConfig{});
    REQUIRE(essentials.fields.size() == 1);

    auto u = extract_usages(index, essentials);
    REQUIRE(u.size() == 2);
    CHECK(u[0].method->qualified_name == "com.acme.store.InMemoryRouteStore.delete(Mono<String>)");
    CHECK(u[1].method->qualified_name ==
          "com.acme.store.InMemoryRouteStore.save(Mono<RouteDefinition>)");
    for (const auto& cand : u) {
        REQUIRE(cand.via_elements.size() == 1);
        CHECK(cand.via_elements[0] == "com.acme.store.InMemoryRouteStore.routes");
    }
}

TEST_CASE("empty essentials extract no usages") {
    auto index = mini_index();
    CHECK(extract_usages(index, EssentialElements{}).empty());
}

TEST_CASE("overlapping usage sets merge and record every via element") {
    auto index = mini_index();
    SketchAnalysis a;
    a.accessed_fields.insert("routes");        // used by save, delete
    a.called_methods.insert({"isEmpty", 1});   // used by save (and isEmpty itself)
    auto essentials = identify_essentials(index, a, EeiConfig{});
    REQUIRE(essentials.fields.size() == 1);
    REQUIRE(essentials.methods.size() == 1);

    auto u = extract_usages(index, essentials);
    // save uses both elements; delete only the field; isEmpty calls itself
    // (arity-relaxed String.isEmpty call inside its own body).
    REQUIRE(u.size() == 3);
    const UsageCandidate* save = nullptr;
    for (const auto& cand : u) {
        if (cand.method->simple_name == "save") save = &cand;
    }
    REQUIRE(save != nullptr);
    CHECK(save->via_elements.size() == 2);
}

TEST_CASE("the infilling method is excluded from the usage set") {
    auto index = mini_index();
    SketchAnalysis a;
    a.accessed_fields.insert("routes");
    auto essentials = identify_essentials(index, a, EeiConfig{});

    const MethodDecl* infilling =
        index.find_method("com.acme.store.InMemoryRouteStore.delete(Mono<String>)");
    REQUIRE(infilling != nullptr);
    auto u = extract_usages(index, essentials, infilling);
    REQUIRE(u.size() == 1);
    CHECK(u[0].method->simple_name == "save");
}

TEST_CASE("a usage whose body equals the sketch ranks first with score 1.0") {
    MethodDecl twin = make_method("a.C.twin()", "{ routes.remove(id); }");
    MethodDecl other = make_method("a.C.other()", "{ log.warn(\"nothing in common\"); }");
    std::vector<UsageCandidate> cands = {{&other, {"a.C.e"}}, {&twin, {"a.C.e"}}};

    auto outcome = rank_usages(cands, make_sketch("{ routes.remove(id); }"),
                               SimilarityConfig{}, 10);
    CHECK_FALSE(outcome.degraded);
    REQUIRE(outcome.usages.size() == 2);
    CHECK(outcome.usages[0].method->qualified_name == "a.C.twin()");
    CHECK(outcome.usages[0].score == 1.0);
    CHECK(outcome.usages[1].score < 1.0);
}

TEST_CASE("k = 0 yields an empty ranking") {
    MethodDecl m = make_method("a.C.m()", "{ x(); }");
    std::vector<UsageCandidate> cands = {{&m, {"a.C.x()"}}};
    auto outcome = rank_usages(cands, make_sketch("{ x(); }"), SimilarityConfig{}, 0);
    CHECK(outcome.usages.empty());
}

TEST_CASE("ranking equals an exhaustive oracle on a random corpus") {
    std::mt19937 rng(20250311u);
    const std::vector<std::string> words = {"route",  "save",   "mono",   "error", "defer",
                                            "filter", "lookup", "cache",  "merge", "retry",
                                            "flush",  "empty",  "remove", "id",    "uri"};
    auto random_body = [&] {
        std::string body = "{ ";
        std::uniform_int_distribution<std::size_t> len(1, 8);
        std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
        std::size_t n = len(rng);
        for (std::size_t i = 0; i < n; ++i) body += words[pick(rng)] + "(); ";
        return body + "}";
    };

    std::vector<MethodDecl> methods;
    methods.reserve(8);
    for (int i = 0; i < 8; ++i) {
        methods.push_back(make_method("a.C.m" + std::to_string(i) + "()", random_body()));
    }
    std::vector<UsageCandidate> cands;
    for (auto& m : methods) cands.push_back({&m, {"a.C.e"}});

    Sketch sketch = make_sketch(random_body());
    SimilarityConfig cfg;

    struct Row {
        std::string name;
        double score;
    };
    std::vector<Row> oracle;
    for (const auto& m : methods) {
        oracle.push_back({m.qualified_name, sim(*m.body_text, sketch.body_text, cfg)});
    }
    std::stable_sort(oracle.begin(), oracle.end(), [](const Row& a, const Row& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.name < b.name;
    });

    for (std::size_t k : {std::size_t(3), std::size_t(8), std::size_t(20)}) {
        auto outcome = rank_usages(cands, sketch, cfg, k);
        REQUIRE(outcome.usages.size() == std::min(k, oracle.size()));
        for (std::size_t i = 0; i < outcome.usages.size(); ++i) {
            CHECK(outcome.usages[i].method->qualified_name == oracle[i].name);
            CHECK(outcome.usages[i].score == doctest::Approx(oracle[i].score).epsilon(1e-12));
        }
    }
}

TEST_CASE("ranking scores are non-increasing and input-order independent") {
    std::vector<MethodDecl> methods;
    for (int i = 0; i < 6; ++i) {
        std::string body = "{ cache.merge(" + std::string(static_cast<std::size_t>(i), 'x') + "); }";
        methods.push_back(make_method("a.C.u" + std::to_string(i) + "()", body));
    }
    std::vector<UsageCandidate> cands;
    for (auto& m : methods) cands.push_back({&m, {"a.C.cache"}});

    Sketch sketch = make_sketch("{ cache.merge(key); }");
    auto baseline = rank_usages(cands, sketch, SimilarityConfig{}, 6);
    for (std::size_t i = 1; i < baseline.usages.size(); ++i) {
        CHECK(baseline.usages[i - 1].score >= baseline.usages[i].score);
    }

    std::mt19937 rng(7u);
    for (int round = 0; round < 5; ++round) {
        std::shuffle(cands.begin(), cands.end(), rng);
        auto shuffled = rank_usages(cands, sketch, SimilarityConfig{}, 6);
        REQUIRE(shuffled.usages.size() == baseline.usages.size());
        for (std::size_t i = 0; i < shuffled.usages.size(); ++i) {
            CHECK(shuffled.usages[i].method->qualified_name ==
                  baseline.usages[i].method->qualified_name);
        }
    }
}

TEST_CASE("token-empty sketch degrades ranking to name order with zero scores") {
    MethodDecl b = make_method("a.C.bravo()", "{ merge(); }");
    MethodDecl a = make_method("a.C.alpha()", "{ flush(); }");
    std::vector<UsageCandidate> cands = {{&b, {"e"}}, {&a, {"e"}}};

    for (const std::string& body : {std::string(""), std::string("{\n}\n")}) {
        auto outcome = rank_usages(cands, make_sketch(body), SimilarityConfig{}, 10);
        CHECK(outcome.degraded);
        REQUIRE(outcome.usages.size() == 2);
        CHECK(outcome.usages[0].method->qualified_name == "a.C.alpha()");
        CHECK(outcome.usages[1].method->qualified_name == "a.C.bravo()");
        CHECK(outcome.usages[0].score == 0.0);
        CHECK(outcome.usages[1].score == 0.0);
    }
}

TEST_CASE("context bundle leads with L and deduplicates against it") {
    MethodDecl shared = make_method("a.C.shared()", "{ x(); }");
    MethodDecl only_usage = make_method("a.C.extra()", "{ x(); }");

    RankingOutcome ranked;
    ranked.usages.push_back({&shared, 0.9, {"e"}});
    ranked.usages.push_back({&only_usage, 0.5, {"e"}});

    MbcProblem problem;
    auto bundle = build_context(problem, {&shared}, ranked, make_sketch("{ x(); }"), "normal");
    REQUIRE(bundle.signature_similar.size() == 1);
    CHECK(bundle.signature_similar[0]->qualified_name == "a.C.shared()");
    REQUIRE(bundle.usages.size() == 1);  // shared kept only in its L slot
    CHECK(bundle.usages[0].method->qualified_name == "a.C.extra()");
    CHECK(bundle.mode == "normal");
    CHECK(bundle.sketch.body_text == "{ x(); }");
}

TEST_CASE("empty inputs produce an empty bundle") {
    MbcProblem problem;
    auto bundle = build_context(problem, {}, RankingOutcome{}, Sketch{}, "normal");
    CHECK(bundle.usages.empty());
    CHECK(bundle.signature_similar.empty());
}

TEST_CASE("oracle mode: a verbatim copy of the reference body ranks first") {
    const std::string reference = "{ if (routes.containsKey(id)) { return Mono.defer(x); } }";
    MethodDecl verbatim = make_method("a.C.copycat()", reference);
    MethodDecl near = make_method("a.C.near()", "{ routes.get(id); }");
    MethodDecl far = make_method("a.C.far()", "{ log.info(msg); }");
    std::vector<UsageCandidate> cands = {{&near, {"e"}}, {&far, {"e"}}, {&verbatim, {"e"}}};

    Sketch oracle_sketch = make_sketch(reference);  // reference body as the sketch
    auto outcome = rank_usages(cands, oracle_sketch, SimilarityConfig{}, 10);
    REQUIRE(!outcome.usages.empty());
    CHECK(outcome.usages[0].method->qualified_name == "a.C.copycat()");
    CHECK(outcome.usages[0].score == 1.0);

    MbcProblem problem;
    problem.reference_body = reference;
    auto bundle = build_context(problem, {}, outcome, oracle_sketch, "oracle");
    CHECK(bundle.mode == "oracle");
    CHECK(bundle.usages[0].method->qualified_name == "a.C.copycat()");
}
