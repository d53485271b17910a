#include <cmath>
#include <sstream>

#include "doctest.h"

#include "dsrim/analysis.hpp"
#include "dsrim/error.hpp"

using namespace dsrim;

namespace {

/// Chain v0 <- v1 <- ... <- v7 (depth 8) plus an isolated node "iso".
KnowledgeGraph chain8()
{
    std::vector<ObjectNode> nodes{{"iso", "", 0}};
    std::vector<Edge> edges;
    for (int i = 0; i < 8; ++i) {
        nodes.push_back({"v" + std::to_string(i), "", 0});
        if (i > 0) {
            edges.push_back({"v" + std::to_string(i), "v" + std::to_string(i - 1), "IS-A"});
        }
    }
    return KnowledgeGraph::from_parts(nodes, edges);
}

std::map<std::string, double> unit_idf(const KnowledgeGraph& g)
{
    std::map<std::string, double> idf;
    for (const auto& node : g.objects()) {
        idf[node.id] = 1.0;
    }
    return idf;
}

/// Two subtrees under a root; documents draw 2-3 objects from one subtree.
struct TwoTopics {
    KnowledgeGraph graph;
    Corpus corpus;
    std::map<std::string, double> idf;
};

TwoTopics two_topics()
{
    std::vector<ObjectNode> nodes{{"root", "", 0}, {"x", "", 0}, {"y", "", 0}};
    std::vector<Edge> edges{{"x", "root", "IS-A"}, {"y", "root", "IS-A"}};
    for (int i = 0; i < 4; ++i) {
        for (const char* branch : {"x", "y"}) {
            const std::string id = std::string(branch) + std::to_string(i);
            nodes.push_back({id, "", 0});
            edges.push_back({id, branch, "IS-A"});
        }
    }
    TwoTopics t{KnowledgeGraph::from_parts(nodes, edges), {}, {}};
    Rng rng(4);
    for (int d = 0; d < 24; ++d) {
        const std::string branch = d % 2 == 0 ? "x" : "y";
        const std::string id = "doc" + std::to_string(d);
        t.corpus.documents[id] = {"w"};
        for (std::size_t j = 0, n = 2 + rng.below(2); j < n; ++j) {
            t.corpus.annotations[id].push_back(branch + std::to_string(rng.below(4)));
        }
    }
    t.corpus.documents["empty"] = {"w"};
    const auto df = annotation_statistics(t.corpus);
    t.idf = idf_from_df(df, t.corpus.documents.size());
    return t;
}

}  // namespace

TEST_CASE("idf from document frequencies")
{
    const auto idf = idf_from_df({{"a", 1}, {"b", 10}}, 10);
    CHECK(idf.at("a") == doctest::Approx(std::log(10.0)));
    CHECK(idf.at("b") == 0.0);
}

TEST_CASE("corley similarity hand values")
{
    const auto g = chain8();
    const auto idf = unit_idf(g);
    CHECK(corley_sim({"v2"}, {"v2"}, g, idf) == doctest::Approx(1.0));
    CHECK(corley_sim({"v2", "v5"}, {"v5", "v2"}, g, idf) == doctest::Approx(1.0));
    CHECK(corley_sim({"v0"}, {"iso"}, g, idf) == 0.0);
    // Four nodes on the path out of 2 * 8: ln(16 / 4) / ln 16 = 0.5.
    CHECK(corley_sim({"v0"}, {"v3"}, g, idf) == doctest::Approx(0.5));

    // Directional weighting: v0 best-matches v0 (1.0); iso matches nothing (0).
    std::map<std::string, double> weighted = idf;
    weighted["iso"] = 3.0;
    const double forward = (1.0 * 1.0 + 3.0 * 0.0) / 4.0;
    const double backward = 1.0;
    CHECK(corley_sim({"v0", "iso"}, {"v0"}, g, weighted) == doctest::Approx((forward + backward) / 2.0));

    CHECK_THROWS_AS(corley_sim({}, {"v0"}, g, idf), Error);
    CHECK_THROWS_AS(corley_sim({"v0"}, {"v1"}, g, {{"v0", 1.0}}), LookupError);
}

TEST_CASE("corley similarity is symmetric, bounded and falls back to uniform weights")
{
    const auto g = chain8();
    auto idf = unit_idf(g);
    Rng rng(9);
    const std::vector<std::string> ids{"v0", "v1", "v2", "v3", "v4", "v5", "v6", "v7", "iso"};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::string> a, b;
        for (std::size_t i = 0, n = 1 + rng.below(4); i < n; ++i) {
            a.push_back(ids[rng.below(ids.size())]);
        }
        for (std::size_t i = 0, n = 1 + rng.below(4); i < n; ++i) {
            b.push_back(ids[rng.below(ids.size())]);
        }
        const double ab = corley_sim(a, b, g, idf);
        CHECK(ab == doctest::Approx(corley_sim(b, a, g, idf)));
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        const RelatednessCache cache(g, a);
        CHECK(corley_sim(a, b, cache, idf) == doctest::Approx(ab));
    }
    std::map<std::string, double> zero;
    for (const auto& id : ids) {
        zero[id] = 0.0;
    }
    CHECK(corley_sim({"v0", "v3"}, {"v0", "v3"}, g, zero) == doctest::Approx(1.0));
}

TEST_CASE("pivot experiment separates topical representations")
{
    const auto t = two_topics();
    auto branch_vector = [](const std::vector<std::string>& objects) {
        Vector v{0.0, 0.0};
        for (const auto& o : objects) {
            v[o[0] == 'x' ? 0 : 1] += 1.0;
        }
        return v;
    };
    auto constant = [](const std::vector<std::string>&) { return Vector{1.0, 1.0}; };
    const std::vector<ReprVariant> variants{{"clustering", 2, "centroid", branch_vector},
                                            {"flat", 2, "none", constant}};
    Warnings w;
    const auto report = pivotal_experiment(variants, t.corpus, t.graph, t.idf, 10, 5, 7, &w);
    CHECK(w.empty());
    REQUIRE(report.rows.size() == 2);
    CHECK(report.pivots == 10);
    CHECK(report.rows[0].top == doctest::Approx(1.0));
    CHECK(report.rows[0].less == doctest::Approx(0.0));
    CHECK(report.rows[0].diff == doctest::Approx(1.0));
    CHECK(report.rows[1].diff == doctest::Approx(0.0));
    CHECK(report.rows[0].label == "clustering");

    const auto again = pivotal_experiment(variants, t.corpus, t.graph, t.idf, 10, 5, 7);
    CHECK(again.rows[0].top == report.rows[0].top);

    pivotal_experiment(variants, t.corpus, t.graph, t.idf, 500, 5, 7, &w);
    CHECK(w.size() == 1);
    CHECK_THROWS_AS(pivotal_experiment(variants, t.corpus, t.graph, t.idf, 10, 12, 7), ConfigError);
}

TEST_CASE("pivot experiment averages agree with a direct recount")
{
    const auto t = two_topics();
    auto count_vector = [](const std::vector<std::string>& objects) {
        Vector v(8, 0.0);
        for (const auto& o : objects) {
            v[(o[0] == 'x' ? 0 : 4) + static_cast<std::size_t>(o[1] - '0')] += 1.0;
        }
        return v;
    };
    const std::vector<ReprVariant> variants{{"counts", 8, "none", count_vector}};
    // Every annotated document is a pivot, so the sample order does not matter.
    const auto report = pivotal_experiment(variants, t.corpus, t.graph, t.idf, 24, 3, 1);

    double top = 0.0;
    double less = 0.0;
    for (const auto& [pivot, objs] : t.corpus.annotations) {
        std::vector<std::pair<double, std::string>> ranked;
        for (const auto& [other, other_objs] : t.corpus.annotations) {
            if (other != pivot) {
                ranked.emplace_back(-corley_sim(objs, other_objs, t.graph, t.idf), other);
            }
        }
        std::sort(ranked.begin(), ranked.end());
        for (std::size_t i = 0; i < 3; ++i) {
            top += cosine(count_vector(objs), count_vector(t.corpus.annotations.at(ranked[i].second))) / 3.0;
            less += cosine(count_vector(objs),
                           count_vector(t.corpus.annotations.at(ranked[ranked.size() - 1 - i].second))) / 3.0;
        }
    }
    CHECK(report.rows[0].top == doctest::Approx(top / 24.0).epsilon(1e-12));
    CHECK(report.rows[0].less == doctest::Approx(less / 24.0).epsilon(1e-12));
}

TEST_CASE("input/output similarity improvement")
{
    // Identity layer: ReLU zeroes the document's negative coordinate, lifting
    // the cosine from 0.2 to 0.6.
    SiameseParams identity;
    identity.layers.push_back({Matrix(2, 2), Vector(2, 0.0)});
    identity.layers[0].weights(0, 0) = identity.layers[0].weights(1, 1) = 1.0;
    const double t = std::acos(0.2) - std::atan2(0.8, 0.6);
    VectorStore store;
    InputVector q;
    q.values = {0.6, 0.8};
    InputVector d;
    d.values = {std::cos(t), -std::sin(t)};
    store.set_query("q", q);
    store.set_document("d", d);
    const auto report = io_similarity_report(identity, {{"q", "d"}, {"q", "missing"}}, store);
    CHECK(report.pairs == 1);
    CHECK(report.input_cosine == doctest::Approx(0.2));
    CHECK(report.output_cosine == doctest::Approx(0.6));
    REQUIRE(report.improvement.has_value());
    CHECK(*report.improvement == doctest::Approx(2.0));

    std::ostringstream out;
    write_io_similarity_tsv(out, report);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    std::size_t pairs = 0;
    double input = 0.0;
    double output = 0.0;
    double pct = 0.0;
    in >> pairs >> input >> output >> pct;
    CHECK(pairs == 1);
    CHECK(input == report.input_cosine);
    CHECK(pct == doctest::Approx(200.0));
}

TEST_CASE("report writers")
{
    SeparationReport sep;
    sep.rows.push_back({"clustering", 40, "centroid", 0.5, 0.25, 0.25});
    sep.pivots = 50;
    sep.neighborhood = 10;
    std::ostringstream tsv;
    write_separation_tsv(tsv, sep);
    CHECK(tsv.str().find("clustering\t40\tcentroid") != std::string::npos);
    std::ostringstream table;
    write_separation_table(table, sep);
    CHECK(table.str().find("Top_10") != std::string::npos);

    DifficultyReport diff;
    diff.classes[0].queries = 2;
    diff.classes[0].baseline_map = 0.5;
    diff.classes[0].model_map = 0.6;
    diff.classes[0].percent_change = 20.0;
    std::ostringstream dtsv;
    write_difficulty_tsv(dtsv, diff);
    CHECK(dtsv.str().find("easy") != std::string::npos);
    std::ostringstream dtable;
    write_difficulty_table(dtable, diff);
    CHECK(dtable.str().find("%Change") != std::string::npos);
}
