#include <doctest.h>

#include "apiguard/errors.hpp"
#include "apiguard/groum.hpp"
#include "support/random_groum.hpp"

using namespace apiguard;
using apiguard::testsupport::random_groum;

TEST_SUITE("usage-graph") {

TEST_CASE("empty groum serializes canonically") {
    CHECK(serialize(Groum{}) == R"({"nodes":[],"edges":[]})");
}

TEST_CASE("round trip equality on 500 random groums") {
    Rng rng(7);
    for (int i = 0; i < 500; ++i) {
        Groum g = random_groum(rng);
        Groum back = deserialize(serialize(g));
        REQUIRE(back == g);
    }
}

TEST_CASE("corpus round trip") {
    Rng rng(8);
    std::vector<Groum> corpus;
    for (int i = 0; i < 20; ++i) corpus.push_back(random_groum(rng));
    CHECK(deserialize_corpus(serialize_corpus(corpus)) == corpus);
}

TEST_CASE("truncated text is a format error with byte offset") {
    std::string text = serialize(Groum{});
    try {
        deserialize(text.substr(0, text.size() - 3));
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.byteOffset > 0);
    }
}

TEST_CASE("serialization is order-canonical") {
    Groum a;
    a.nodes = {Node{0, "A.f", NodeKind::Action, std::nullopt},
               Node{1, "A.g", NodeKind::Action, std::nullopt}};
    a.edges = {Edge{0, 1, EdgeType::DataDep}, Edge{0, 1, EdgeType::Order}};
    Groum b = a;
    std::swap(b.nodes[0], b.nodes[1]);
    std::swap(b.edges[0], b.edges[1]);
    CHECK(serialize(a) == serialize(b));
}

TEST_CASE("validate rejects structural violations") {
    Groum g;
    g.nodes = {Node{0, "A.f", NodeKind::Action, std::nullopt},
               Node{1, "A.g", NodeKind::Action, std::nullopt}};

    SUBCASE("self loop") {
        g.edges = {Edge{0, 0, EdgeType::Order}};
        CHECK_THROWS_AS(g.validate(), InvalidGroum);
    }
    SUBCASE("duplicate edge") {
        g.edges = {Edge{0, 1, EdgeType::Order}, Edge{0, 1, EdgeType::Order}};
        CHECK_THROWS_AS(g.validate(), InvalidGroum);
    }
    SUBCASE("dangling endpoint") {
        g.edges = {Edge{0, 5, EdgeType::Order}};
        CHECK_THROWS_AS(g.validate(), InvalidGroum);
    }
    SUBCASE("order cycle") {
        g.edges = {Edge{0, 1, EdgeType::Order}, Edge{1, 0, EdgeType::Order}};
        CHECK_THROWS_AS(g.validate(), InvalidGroum);
    }
    SUBCASE("non-dense ids") {
        g.nodes[1].id = 3;
        CHECK_THROWS_AS(g.validate(), InvalidGroum);
    }
    SUBCASE("control kind on action node") {
        g.nodes[0].control = ControlKind::If;
        CHECK_THROWS_AS(g.validate(), InvalidGroum);
    }
    SUBCASE("region owned by action node") {
        g.regions[0] = {1};
        CHECK_THROWS_AS(g.validate(), InvalidGroum);
    }
}

TEST_CASE("deserialize validates") {
    CHECK_THROWS_AS(deserialize(R"({"nodes":[{"id":0,"label":"A.f","kind":"Action"}],)"
                                R"("edges":[{"type":"Order","src":0,"dst":0}]})"),
                    FormatError);
}

} // TEST_SUITE
