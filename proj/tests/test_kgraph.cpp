#include <cmath>
#include <sstream>

#include "doctest.h"

#include "dsrim/error.hpp"
#include "dsrim/kgraph.hpp"
#include "oracles.hpp"

using namespace dsrim;

namespace {

KnowledgeGraph load(const std::string& nodes, const std::string& edges, const std::string& filter = "IS-A")
{
    std::istringstream n(nodes);
    std::istringstream e(edges);
    return load_graph(n, e, filter);
}

const char* kAbc = "a\tA\nb\tB\nc\tC\n";

}  // namespace

TEST_CASE("load_graph keeps only the filtered relation")
{
    const auto g = load(kAbc, "b\ta\tIS-A\nc\tb\tIS-A\nc\ta\tPART-OF\n");
    CHECK(g.size() == 3);
    CHECK(g.edges().size() == 2);
    CHECK(g.max_depth() == 3);

    const auto all = load(kAbc, "b\ta\tIS-A\nc\tb\tIS-A\nc\ta\tPART-OF\n", "*");
    CHECK(all.edges().size() == 3);
    CHECK(all.path_length("a", "c").value() == 2);
}

TEST_CASE("load_graph without edges gives isolated nodes of depth 1")
{
    const auto g = load(kAbc, "# no edges\n");
    CHECK(g.max_depth() == 1);
    CHECK_FALSE(g.path_length("a", "b"));
    CHECK(g.leacock_sim("a", "b") == 0.0);
}

TEST_CASE("load_graph errors")
{
    CHECK_THROWS_WITH_AS(load(kAbc, "x\ta\tIS-A\n"), doctest::Contains("'x'"), LoadError);
    // an unknown endpoint on a filtered-out relation is ignored
    CHECK_NOTHROW(load(kAbc, "x\ta\tPART-OF\n"));
    try {
        load("a\tA\nb\n", "");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(load("a\tA\na\tB\n", ""), ParseError);
    CHECK_THROWS_AS(load(kAbc, "a\tb\tIS-A\nb\ta\tIS-A\n"), LoadError);
    CHECK_THROWS_AS(load(kAbc, "a\ta\tIS-A\n"), LoadError);
}

TEST_CASE("duplicate edges collapse")
{
    const auto g = load(kAbc, "b\ta\tIS-A\nb\ta\tIS-A\n");
    CHECK(g.edges().size() == 1);
}

TEST_CASE("path length counts nodes")
{
    const auto g = load(kAbc, "b\ta\tIS-A\nc\tb\tIS-A\n");
    CHECK(g.path_length("a", "c").value() == 3);
    CHECK(g.path_length("a", "a").value() == 1);
    CHECK(g.path_length("b", "c").value() == 2);
    CHECK_THROWS_AS(g.path_length("a", "zz"), LookupError);

    const auto split = load("a\tA\nb\tB\nc\tC\nd\tD\n", "b\ta\tIS-A\nd\tc\tIS-A\n");
    CHECK_FALSE(split.path_length("a", "d"));
}

TEST_CASE("leacock on a three-node chain")
{
    const auto g = load(kAbc, "b\ta\tIS-A\nc\tb\tIS-A\n");
    CHECK(g.leacock_sim("a", "c") == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(g.leacock_sim("a", "a") == doctest::Approx(std::log(6.0)));
    CHECK(g.max_relatedness() == doctest::Approx(std::log(6.0)));
    CHECK(g.leacock_sim("c", "a") == g.leacock_sim("a", "c"));
    CHECK_THROWS_AS(g.leacock_sim("a", "q"), LookupError);
}

TEST_CASE("leacock decreases strictly along a chain")
{
    oracle::SimpleGraph chain;
    chain.n = 12;
    for (int i = 1; i < chain.n; ++i) {
        chain.edges.emplace_back(i, i - 1);
    }
    const auto g = oracle::to_knowledge_graph(chain);
    CHECK(g.max_depth() == 12);
    double previous = g.leacock_sim("v0", "v0");
    for (int i = 1; i < chain.n; ++i) {
        const double s = g.leacock_sim("v0", oracle::vertex_id(i));
        CHECK(s < previous);
        CHECK(s > 0.0);
        previous = s;
    }
}

TEST_CASE("path lengths match Floyd-Warshall on random graphs")
{
    Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(19));
        const auto sg = oracle::random_graph(rng, n, rng.uniform(0.05, 0.4));
        const auto g = oracle::to_knowledge_graph(sg);
        const auto dist = oracle::floyd_warshall(sg);
        const int depth = oracle::longest_chain(sg);
        CHECK(static_cast<int>(g.max_depth()) == depth);
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                const auto len = g.path_length(oracle::vertex_id(a), oracle::vertex_id(b));
                if (dist[a][b] >= oracle::kInf) {
                    CHECK_FALSE(len);
                } else {
                    REQUIRE(len);
                    CHECK(static_cast<int>(*len) == dist[a][b] + 1);
                }
                CHECK(g.leacock_sim(oracle::vertex_id(a), oracle::vertex_id(b)) ==
                      doctest::Approx(oracle::leacock(dist[a][b], depth)).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("leacock is symmetric and self-maximal on graphs up to 30 nodes")
{
    Rng rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 20 + static_cast<int>(rng.below(11));
        const auto g = oracle::to_knowledge_graph(oracle::random_graph(rng, n, 0.1));
        for (int a = 0; a < n; ++a) {
            const double self = g.leacock_sim(oracle::vertex_id(a), oracle::vertex_id(a));
            for (int b = 0; b < n; ++b) {
                const double ab = g.leacock_sim(oracle::vertex_id(a), oracle::vertex_id(b));
                CHECK(ab == g.leacock_sim(oracle::vertex_id(b), oracle::vertex_id(a)));
                CHECK(ab <= self);
                CHECK(ab >= 0.0);
            }
        }
    }
}

TEST_CASE("relatedness cache agrees with direct queries")
{
    Rng rng(3);
    const auto sg = oracle::random_tree(rng, 25);
    const auto g = oracle::to_knowledge_graph(sg);
    const RelatednessCache cache(g, {"v0", "v3", "v7"});
    for (int a = 0; a < 25; ++a) {
        for (int b = 0; b < 25; ++b) {
            const auto ia = oracle::vertex_id(a);
            const auto ib = oracle::vertex_id(b);
            CHECK(cache.leacock(ia, ib) == g.leacock_sim(ia, ib));
        }
    }
}

TEST_CASE("graph cache round trip")
{
    auto g = load(kAbc, "b\ta\tIS-A\nc\tb\tIS-A\n");
    g.set_document_frequencies({{"a", 4}, {"c", 1}, {"unknown", 3}});
    std::stringstream buffer;
    save_graph(buffer, g);
    const auto back = load_graph_cache(buffer);
    CHECK(back.size() == 3);
    CHECK(back.edges() == g.edges());
    CHECK(back.object("a").df == 4);
    CHECK(back.object("b").df == 0);
    CHECK(back.object("a").label == "A");
    CHECK(back.max_depth() == 3);
}
