#include <doctest.h>

#include "apiguard/api_spec.hpp"
#include "apiguard/errors.hpp"
#include "apiguard/signature.hpp"
#include "apiguard/usage_lang.hpp"
#include "support/random_groum.hpp"

using namespace apiguard;

namespace {

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

Groum listing1_groum() {
    return lang::build_groum(lang::parse(kListing1).methods[0]);
}

ApiSpec buffered_reader_spec() {
    return parse_api_spec("BufferedReader\n", "jdk");
}

bool has_label(const Groum& g, const std::string& label) {
    for (const Node& n : g.nodes)
        if (n.label == label) return true;
    return false;
}

} // namespace

TEST_SUITE("usage-graph") {

TEST_CASE("api spec parsing and matching") {
    ApiSpec spec = parse_api_spec("# io api\nBufferedReader\nFileReader.close\n", "jdk");
    CHECK(spec.types == std::set<std::string>{"BufferedReader", "FileReader"});
    CHECK(spec.matches("BufferedReader.readLine"));
    CHECK(spec.matches("FileReader.close"));
    CHECK_FALSE(spec.matches("FileReader.read"));
    CHECK_FALSE(spec.matches("StringBuffer.append"));
    CHECK(render_api_spec(parse_api_spec(render_api_spec(spec), "jdk")) == render_api_spec(spec));
}

TEST_CASE("api spec with no types is rejected") {
    CHECK_THROWS_AS(parse_api_spec("# nothing here\n", "x"), ConfigError);
}

TEST_CASE("listing-1 pruned to BufferedReader") {
    Groum pruned = prune(listing1_groum(), buffered_reader_spec());
    pruned.validate();
    CHECK(has_label(pruned, "BufferedReader.<init>"));
    CHECK(has_label(pruned, "BufferedReader.readLine"));
    CHECK(has_label(pruned, "BufferedReader.close"));
    CHECK(has_label(pruned, "LOOP"));
    CHECK(pruned.nodes.size() == 4);
    CHECK_FALSE(has_label(pruned, "StringBuffer.<init>"));
    CHECK_FALSE(has_label(pruned, "FileReader.<init>"));
    int loop = -1, readLine = -1, init = -1, close = -1;
    for (const Node& n : pruned.nodes) {
        if (n.label == "LOOP") loop = n.id;
        if (n.label == "BufferedReader.readLine") readLine = n.id;
        if (n.label == "BufferedReader.<init>") init = n.id;
        if (n.label == "BufferedReader.close") close = n.id;
    }
    CHECK(pruned.hasEdge(loop, readLine, EdgeType::LoopInclusion));
    CHECK(pruned.hasEdge(init, readLine, EdgeType::DataDep));
    CHECK(pruned.hasEdge(init, close, EdgeType::DataDep));
}

TEST_CASE("no surviving node raises EmptySignature") {
    ApiSpec spec = parse_api_spec("Socket\n", "net");
    CHECK_THROWS_AS(prune(listing1_groum(), spec, "readAll"), EmptySignature);
}

TEST_CASE("prune is identity on fully-API graphs") {
    ApiSpec spec = parse_api_spec("BufferedReader\nFileReader\nStringBuffer\n", "all");
    Groum g = listing1_groum();
    CHECK(prune(g, spec) == g);
}

TEST_CASE("prune is idempotent and never grows") {
    Rng rng(99);
    ApiSpec spec = parse_api_spec("Reader\nWriter\n", "rw");
    int nonEmpty = 0;
    for (int i = 0; i < 300; ++i) {
        Groum g = testsupport::random_groum(rng);
        try {
            Groum once = prune(g, spec);
            ++nonEmpty;
            CHECK(once.nodes.size() <= g.nodes.size());
            CHECK(once.orderAcyclic());
            CHECK(prune(once, spec) == once);
        } catch (const EmptySignature&) {
        }
    }
    CHECK(nonEmpty > 50);
}

TEST_CASE("prune preserves order reachability between retained nodes") {
    Rng rng(123);
    ApiSpec spec = parse_api_spec("Reader\nWriter\n", "rw");
    for (int i = 0; i < 200; ++i) {
        Groum g = testsupport::random_groum(rng);
        Groum pruned;
        try {
            pruned = prune(g, spec);
        } catch (const EmptySignature&) {
            continue;
        }
        // map retained labels by original id order of matching nodes
        std::vector<int> retained;
        for (const Node& n : g.nodes) {
            bool kept = n.kind == NodeKind::Action ? spec.matches(n.label) : false;
            if (kept) retained.push_back(n.id);
        }
        // retained action nodes keep their relative order after re-densifying
        std::vector<int> prunedActions;
        for (const Node& n : pruned.nodes)
            if (n.kind == NodeKind::Action) prunedActions.push_back(n.id);
        REQUIRE(prunedActions.size() == retained.size());
        for (std::size_t a = 0; a < retained.size(); ++a)
            for (std::size_t b = 0; b < retained.size(); ++b) {
                if (a == b) continue;
                CHECK(g.orderReaches(retained[a], retained[b]) ==
                      pruned.orderReaches(prunedActions[a], prunedActions[b]));
            }
    }
}

TEST_CASE("simplify drops every data dependency") {
    UsageSignature sig = extract_signature(listing1_groum(), buffered_reader_spec(), "readAll");
    int before = 0;
    for (const Edge& e : sig.groum.edges)
        if (e.type == EdgeType::DataDep) ++before;
    CHECK(before == 2);
    UsageSignature simple = simplify(sig);
    CHECK(simple.simple);
    for (const Edge& e : simple.groum.edges) CHECK(e.type != EdgeType::DataDep);
    CHECK(simple.groum.nodes == sig.groum.nodes);
    CHECK(simplify(simple).groum == simple.groum);
}

} // TEST_SUITE
