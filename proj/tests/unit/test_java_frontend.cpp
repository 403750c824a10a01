#include <doctest.h>

#include <algorithm>
#include <string>

#include "repofill/body_scan.hpp"
#include "repofill/index.hpp"
#include "repofill/java_lexer.hpp"

using namespace repofill;

namespace {

FileDecls parse(std::string_view src) {
    return frontend_by_name("java").parse_file(src, "Demo.java", false);
}

const MethodDecl& method_named(const FileDecls& d, std::string_view simple) {
    for (const auto& m : d.methods)
        if (m.simple_name == simple) return m;
    REQUIRE(false);
    return d.methods.front();
}

}  // namespace

TEST_SUITE("java_frontend") {

TEST_CASE("lexer token shapes") {
    auto lexed = lex_java("int x = 0xFF; // note\nString s = \"a\\\"b\"; a->b; m(A::new);");
    CHECK(lexed.error_count == 0);
    std::vector<std::string> texts;
    for (const auto& t : lexed.tokens) texts.emplace_back(t.text);
    CHECK(std::find(texts.begin(), texts.end(), "0xFF") != texts.end());
    CHECK(std::find(texts.begin(), texts.end(), "\"a\\\"b\"") != texts.end());
    CHECK(std::find(texts.begin(), texts.end(), "->") != texts.end());
    CHECK(std::find(texts.begin(), texts.end(), "::") != texts.end());
}

TEST_CASE("lexer survives text blocks and unterminated comments") {
    auto ok = lex_java("String s = \"\"\"\n  hello \"world\"\n  \"\"\";");
    CHECK(ok.error_count == 0);
    auto bad = lex_java("int a; /* never closed");
    CHECK(bad.error_count == 1);
    CHECK(bad.tokens.size() == 3);
}

TEST_CASE("one class, two methods, one field") {
    auto d = parse(R"(package p;

public class Solo {
    private int n;

    public int get() {
        return n;
    }

    public void bump(int by) {
        n = n + by;
    }
}
)");
    CHECK(d.classes.size() == 1);
    CHECK(d.methods.size() == 2);
    CHECK(d.fields.size() == 1);
    CHECK(d.classes[0].qualified_name == "p.Solo");
    CHECK(d.classes[0].simple_name == "Solo");
    CHECK(d.fields[0].qualified_name == "p.Solo.n");
    CHECK(d.fields[0].type_name == "int");
}

TEST_CASE("method metadata: params, body text, loc, signature") {
    auto d = parse(R"(package p;

class C {
    Map<String, Integer> tally(List<String> names, int limit) {
        Map<String, Integer> m = new HashMap<>();
        return m;
    }
}
)");
    const auto& m = method_named(d, "tally");
    CHECK(m.qualified_name == "p.C.tally(List<String>,int)");
    CHECK(m.return_type == "Map<String,Integer>");
    REQUIRE(m.params.size() == 2);
    CHECK(m.params[0].first == "List<String>");
    CHECK(m.params[0].second == "names");
    CHECK(m.params[1].first == "int");
    CHECK(m.params[1].second == "limit");
    REQUIRE(m.body_text.has_value());
    CHECK(m.body_text->starts_with("{"));
    CHECK(m.body_text->ends_with("}"));
    CHECK(m.body_loc == 4);
    CHECK(signature_text(m) == "Map<String,Integer> tally(List<String>,int)");
}

TEST_CASE("constructors are flagged and abstract methods have no body") {
    auto d = parse(R"(package p;

abstract class Base {
    Base(int seed) {
        this.seed = seed;
    }

    abstract void run();

    private int seed;
}
)");
    const auto& ctor = method_named(d, "Base");
    CHECK(ctor.is_ctor);
    CHECK(ctor.return_type.empty());
    CHECK(ctor.body_text.has_value());
    const auto& run = method_named(d, "run");
    CHECK_FALSE(run.body_text.has_value());
    CHECK(run.body_loc == 0);
}

TEST_CASE("a() calling b() yields exactly one call edge") {
    auto d = parse(R"(package p;

class C {
    void a() {
        b();
    }

    void b() {
    }
}
)");
    std::vector<UsageEdge> calls;
    for (const auto& e : d.usage_edges)
        if (e.kind == UsageKind::call) calls.push_back(e);
    REQUIRE(calls.size() == 1);
    CHECK(calls[0].user == "p.C.a()");
    CHECK(calls[0].target_simple_name == "b");
    CHECK(calls[0].arg_count == 0);
}

TEST_CASE("nested types, enums and records") {
    auto d = parse(R"(package p;

public class Outer {
    enum State {
        OPEN, CLOSED;

        boolean open() {
            return this == OPEN;
        }
    }

    record Point(int x, int y) {
        double norm() {
            return Math.sqrt(x * x + y * y);
        }
    }

    interface Listener {
        void onChange(State s);
    }

    static class Inner {
        int z;
    }
}
)");
    auto has_class = [&](std::string_view q) {
        return std::any_of(d.classes.begin(), d.classes.end(),
                           [&](const ClassDecl& c) { return c.qualified_name == q; });
    };
    CHECK(has_class("p.Outer"));
    CHECK(has_class("p.Outer.State"));
    CHECK(has_class("p.Outer.Point"));
    CHECK(has_class("p.Outer.Listener"));
    CHECK(has_class("p.Outer.Inner"));

    // enum constants land as fields typed by the enum
    auto field = [&](std::string_view q) -> const FieldDecl* {
        for (const auto& f : d.fields)
            if (f.qualified_name == q) return &f;
        return nullptr;
    };
    REQUIRE(field("p.Outer.State.OPEN"));
    CHECK(field("p.Outer.State.OPEN")->type_name == "State");
    REQUIRE(field("p.Outer.Point.x"));
    CHECK(field("p.Outer.Point.x")->type_name == "int");
    CHECK(field("p.Outer.Inner.z"));

    CHECK(method_named(d, "open").owner_class == "p.Outer.State");
    CHECK(method_named(d, "norm").owner_class == "p.Outer.Point");
    CHECK_FALSE(method_named(d, "onChange").body_text.has_value());
}

TEST_CASE("multi-declarator fields") {
    auto d = parse("class C { int a, b = 2, c; }");
    CHECK(d.fields.size() == 3);
    CHECK(d.fields[0].simple_name == "a");
    CHECK(d.fields[1].simple_name == "b");
    CHECK(d.fields[2].simple_name == "c");
    for (const auto& f : d.fields) CHECK(f.type_name == "int");
}

TEST_CASE("body scan separates calls, fields and types") {
    std::string body = R"({
        if (routes.containsKey(id)) {
            routes.remove(id);
            return Mono.empty();
        }
        return Mono.defer(() -> Mono.error(new NotFoundException("x")));
    })";
    auto lexed = lex_java(body);
    auto scan = scan_java_statements(lexed.tokens, 0, lexed.tokens.size(), {"id"});
    CHECK(scan.balanced);

    auto has_call = [&](std::string_view n, int arity) {
        return std::any_of(scan.calls.begin(), scan.calls.end(), [&](const ScanHit& h) {
            return h.name == n && h.arity == arity;
        });
    };
    CHECK(has_call("containsKey", 1));
    CHECK(has_call("remove", 1));
    CHECK(has_call("empty", 0));
    CHECK(has_call("defer", 1));
    CHECK(has_call("error", 1));

    CHECK(std::any_of(scan.field_reads.begin(), scan.field_reads.end(),
                      [](const ScanHit& h) { return h.name == "routes"; }));
    // the lambda-bound and parameter names stay out
    CHECK(std::none_of(scan.field_reads.begin(), scan.field_reads.end(),
                       [](const ScanHit& h) { return h.name == "id"; }));
    CHECK(std::any_of(scan.type_uses.begin(), scan.type_uses.end(),
                      [](const ScanHit& h) { return h.name == "Mono"; }));
    CHECK(std::any_of(scan.type_uses.begin(), scan.type_uses.end(),
                      [](const ScanHit& h) { return h.name == "NotFoundException"; }));
}

TEST_CASE("body scan excludes locals and handles declarations") {
    std::string body = R"({
        int x = 1;
        RouteDefinition def = lookup(x);
        for (String name : names) {
            sink.accept(name);
        }
        List<Route> all = new ArrayList<>();
        return x;
    })";
    auto lexed = lex_java(body);
    auto scan = scan_java_statements(lexed.tokens, 0, lexed.tokens.size(), {});

    auto field_named = [&](std::string_view n) {
        return std::any_of(scan.field_reads.begin(), scan.field_reads.end(),
                           [&](const ScanHit& h) { return h.name == n; });
    };
    CHECK_FALSE(field_named("x"));
    CHECK_FALSE(field_named("def"));
    CHECK_FALSE(field_named("name"));
    CHECK_FALSE(field_named("all"));
    CHECK(field_named("names"));  // iterated collection is a bare read
    CHECK(field_named("sink"));

    auto type_named = [&](std::string_view n) {
        return std::any_of(scan.type_uses.begin(), scan.type_uses.end(),
                           [&](const ScanHit& h) { return h.name == n; });
    };
    CHECK(type_named("RouteDefinition"));
    CHECK(type_named("String"));
    CHECK(type_named("List"));
    CHECK(type_named("Route"));
    CHECK(type_named("ArrayList"));
}

TEST_CASE("local-only sketch bodies produce no hits") {
    auto lexed = lex_java("{ int x = 1; return x; }");
    auto scan = scan_java_statements(lexed.tokens, 0, lexed.tokens.size(), {});
    CHECK(scan.calls.empty());
    CHECK(scan.field_reads.empty());
    CHECK(scan.type_uses.empty());
}

TEST_CASE("method references credit only the qualifier") {
    auto lexed = lex_java("{ list.forEach(this::add); use(String::valueOf); }");
    auto scan = scan_java_statements(lexed.tokens, 0, lexed.tokens.size(), {});
    CHECK(std::none_of(scan.calls.begin(), scan.calls.end(),
                       [](const ScanHit& h) { return h.name == "add" || h.name == "valueOf"; }));
    CHECK(std::any_of(scan.type_uses.begin(), scan.type_uses.end(),
                      [](const ScanHit& h) { return h.name == "String"; }));
}

TEST_CASE("constants read as field-style accesses") {
    auto lexed = lex_java("{ return Integer.MAX_VALUE + TIMEOUT; }");
    auto scan = scan_java_statements(lexed.tokens, 0, lexed.tokens.size(), {});
    auto field_named = [&](std::string_view n) {
        return std::any_of(scan.field_reads.begin(), scan.field_reads.end(),
                           [&](const ScanHit& h) { return h.name == n; });
    };
    CHECK(field_named("MAX_VALUE"));
    CHECK(field_named("TIMEOUT"));
    CHECK(std::any_of(scan.type_uses.begin(), scan.type_uses.end(),
                      [](const ScanHit& h) { return h.name == "Integer"; }));
}

TEST_CASE("casts and instanceof register the type") {
    auto lexed = lex_java("{ Object o = get(); if (o instanceof Route r) { use((Route) o); } }");
    auto scan = scan_java_statements(lexed.tokens, 0, lexed.tokens.size(), {});
    int route_mentions = 0;
    for (const auto& h : scan.type_uses)
        if (h.name == "Route") ++route_mentions;
    CHECK(route_mentions == 2);
    // the pattern variable r is a local
    CHECK(std::none_of(scan.field_reads.begin(), scan.field_reads.end(),
                       [](const ScanHit& h) { return h.name == "r" || h.name == "o"; }));
}

TEST_CASE("unknown frontend is rejected") {
    CHECK_THROWS_AS(frontend_by_name("python"), std::invalid_argument);
}

}  // TEST_SUITE
