#include <doctest.h>

#include <sstream>

#include "apiguard/errors.hpp"
#include "apiguard/rng.hpp"
#include "apiguard/usage_lang.hpp"

using namespace apiguard;
using namespace apiguard::lang;

namespace {

int count_actions(const Groum& g) {
    int n = 0;
    for (const Node& node : g.nodes)
        if (node.kind == NodeKind::Action) ++n;
    return n;
}

bool has_node(const Groum& g, const std::string& label) {
    for (const Node& n : g.nodes)
        if (n.label == label) return true;
    return false;
}

int node_id(const Groum& g, const std::string& label) {
    for (const Node& n : g.nodes)
        if (n.label == label) return n.id;
    return -1;
}

const char* kListing1 = R"(
method readAll {
  f = new FileReader(path)
  r = new BufferedReader(f)
  sb = new StringBuffer()
  loop {
    l = r.readLine()
    sb.append(l)
  }
  r.close()
}
)";

/// Random program generator for the parse/render round trip.
std::string random_program(Rng& rng) {
    std::ostringstream out;
    int methods = 1 + static_cast<int>(rng.nextIndex(3));
    int varCounter = 0;
    for (int m = 0; m < methods; ++m) {
        out << "method m" << m << " {\n";
        std::vector<std::string> bound;
        int stmts = static_cast<int>(rng.nextIndex(6));
        for (int s = 0; s < stmts; ++s) {
            switch (rng.nextIndex(5)) {
            case 0: {
                std::string v = "v" + std::to_string(varCounter++);
                out << v << " = new Widget(";
                if (!bound.empty() && rng.nextBool(0.5)) out << bound[rng.nextIndex(bound.size())];
                out << ")\n";
                bound.push_back(v);
                break;
            }
            case 1: {
                std::string recv = bound.empty() ? "Widget" : bound[rng.nextIndex(bound.size())];
                if (rng.nextBool(0.5)) {
                    std::string v = "v" + std::to_string(varCounter++);
                    out << v << " = " << recv << ".poke()\n";
                    bound.push_back(v);
                } else {
                    out << recv << ".poke()\n";
                }
                break;
            }
            case 2: {
                if (bound.empty()) break;
                std::string v = "v" + std::to_string(varCounter++);
                out << v << " = " << bound[rng.nextIndex(bound.size())] << ".field\n";
                bound.push_back(v);
                break;
            }
            case 3:
                out << "if { Widget.poke() }";
                if (rng.nextBool(0.5)) out << " else { Widget.prod() }";
                out << "\n";
                break;
            default:
                if (rng.nextBool(0.5))
                    out << "loop { Widget.poke() }\n";
                else
                    out << "try { Widget.poke() } catch (Boom) { Widget.prod() }\n";
                break;
            }
        }
        out << "}\n";
    }
    return out.str();
}

} // namespace

TEST_SUITE("usage-lang") {

TEST_CASE("three statement method parses") {
    auto p = parse("method m { r = new BufferedReader(f) l = r.readLine() r.close() }");
    REQUIRE(p.methods.size() == 1);
    CHECK(p.methods[0].name == "m");
    CHECK(p.methods[0].body.size() == 3);
}

TEST_CASE("empty body parses") {
    auto p = parse("method m { }");
    REQUIRE(p.methods.size() == 1);
    CHECK(p.methods[0].body.empty());
}

TEST_CASE("dangling dot is a syntax error") {
    CHECK_THROWS_AS(parse("method m { x. }"), SyntaxError);
}

TEST_CASE("unbound lowercase receiver") {
    CHECK_THROWS_AS(parse("method m { y = x.foo() }"), UnboundVariable);
}

TEST_CASE("rebinding a name is rejected") {
    CHECK_THROWS_AS(parse("method m { x = new A() x = new B() }"), SyntaxError);
}

TEST_CASE("duplicate method names are rejected") {
    CHECK_THROWS_AS(parse("method m { } method m { }"), SyntaxError);
}

TEST_CASE("comments are skipped") {
    auto p = parse("// header\nmethod m { // inline\n Widget.poke() }");
    CHECK(p.methods[0].body.size() == 1);
}

TEST_CASE("listing-1 groum structure") {
    auto p = parse(kListing1);
    Groum g = build_groum(p.methods[0]);
    g.validate();
    CHECK(has_node(g, "FileReader.<init>"));
    CHECK(has_node(g, "BufferedReader.<init>"));
    CHECK(has_node(g, "StringBuffer.<init>"));
    CHECK(has_node(g, "BufferedReader.readLine"));
    CHECK(has_node(g, "StringBuffer.append"));
    CHECK(has_node(g, "BufferedReader.close"));
    CHECK(has_node(g, "LOOP"));
    int loop = node_id(g, "LOOP");
    int init = node_id(g, "BufferedReader.<init>");
    int readLine = node_id(g, "BufferedReader.readLine");
    int close = node_id(g, "BufferedReader.close");
    CHECK(g.hasEdge(loop, readLine, EdgeType::LoopInclusion));
    CHECK(g.hasEdge(init, readLine, EdgeType::DataDep));
    CHECK(g.hasEdge(init, close, EdgeType::DataDep));
}

TEST_CASE("single call yields one node no edges") {
    auto p = parse("method m { Foo.bar() }");
    Groum g = build_groum(p.methods[0]);
    CHECK(g.nodes.size() == 1);
    CHECK(g.edges.empty());
}

TEST_CASE("two unrelated calls yield one order edge") {
    auto p = parse("method m { Foo.bar() Baz.qux() }");
    Groum g = build_groum(p.methods[0]);
    CHECK(g.nodes.size() == 2);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].type == EdgeType::Order);
}

TEST_CASE("catch node carries the exception type") {
    auto p = parse("method m { try { Foo.bar() } catch (Boom) { Foo.baz() } }");
    Groum g = build_groum(p.methods[0]);
    CHECK(has_node(g, "Boom"));
    int c = node_id(g, "Boom");
    int guarded = node_id(g, "Foo.bar");
    CHECK(g.hasEdge(c, guarded, EdgeType::ExceptionScope));
}

TEST_CASE("parse render round trip on 500 random programs") {
    Rng rng(20240817);
    for (int i = 0; i < 500; ++i) {
        std::string src = random_program(rng);
        UsageProgram a = parse(src);
        UsageProgram b = parse(render(a));
        REQUIRE_MESSAGE(same_structure(a, b), "program:\n" << src);
    }
}

TEST_CASE("groum properties on random programs") {
    Rng rng(42);
    for (int i = 0; i < 200; ++i) {
        UsageProgram p = parse(random_program(rng));
        for (const MethodDecl& m : p.methods) {
            Groum g = build_groum(m);
            g.validate();
            CHECK(g.orderAcyclic());
            for (const Edge& e : g.edges) {
                if (e.type != EdgeType::DataDep) continue;
                // binding precedes use: never an Order path from use to binding
                CHECK_FALSE(g.orderReaches(e.dst, e.src));
            }
        }
    }
}

TEST_CASE("action count equals statement count for straight-line code") {
    auto p = parse("method m { a = new A() b = a.f() c = a.field A.s() }");
    Groum g = build_groum(p.methods[0]);
    CHECK(count_actions(g) == 4);
}

} // TEST_SUITE
