#include <set>
#include <sstream>

#include "doctest.h"

#include "dsrim/corpus.hpp"
#include "dsrim/error.hpp"

using namespace dsrim;

namespace {

Corpus small_corpus(Warnings* warnings = nullptr)
{
    std::istringstream docs(R"({"id": "d1", "text": "Apple pie recipe"}
{"id": "d2", "text": "Pie crust"}
{"id": "d3", "text": "Nothing relevant"}
{"id": "d4", "text": "apple orchard apple"}
)");
    std::istringstream queries(R"({"id": "q1", "text": "apple pie"}
)");
    return load_corpus(docs, queries, warnings);
}

Qrels make_qrels(const std::string& rows)
{
    std::istringstream in(rows);
    return load_qrels(in);
}

}  // namespace

TEST_CASE("corpus records are tokenized")
{
    const auto corpus = small_corpus();
    CHECK(corpus.documents.size() == 4);
    CHECK(corpus.documents.at("d1") == TokenList{"apple", "pie", "recipe"});
    CHECK(corpus.queries.at("q1") == TokenList{"apple", "pie"});
    CHECK(corpus.objects_of("d1").empty());
}

TEST_CASE("corpus errors and warnings")
{
    auto load = [](const std::string& docs) {
        std::istringstream d(docs);
        std::istringstream q("");
        Warnings w;
        load_corpus(d, q, &w);
        return w;
    };
    CHECK_THROWS_AS(load("{\"id\": \"a\", \"text\": \"x\"}\n{\"id\": \"a\", \"text\": \"y\"}\n"), ParseError);
    CHECK_THROWS_AS(load("not json\n"), ParseError);
    CHECK_THROWS_AS(load("{\"id\": 3, \"text\": \"x\"}\n"), ParseError);
    CHECK(load("{\"id\": \"a\", \"text\": \"\"}\n").size() == 1);
    try {
        load("{\"id\": \"a\", \"text\": \"x\"}\n{oops\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("annotation statistics: df and avg_no")
{
    // d1 {o1, o2}, d2 {o1, o1}, d3 {}, d4 {o3, o1}: 6 objects over 4 documents.
    auto corpus = small_corpus();
    std::istringstream ann("d1\to1\nd1\to2\nd2\to1\nd2\to1\nd4\to3\nd4\to1\nq1\to9\n");
    const auto df = load_annotations(ann, corpus);
    CHECK(corpus.avg_no == doctest::Approx(1.5));
    CHECK(df.at("o1") == 3);
    CHECK(df.at("o2") == 1);
    CHECK(df.count("o9") == 0);
    CHECK(corpus.objects_of("d2") == std::vector<std::string>{"o1", "o1"});
    CHECK(corpus.objects_of("q1") == std::vector<std::string>{"o9"});

    std::istringstream again("d1\to1\nd1\to2\nd2\to1\nd2\to1\nd4\to3\nd4\to1\nq1\to9\n");
    AnnotationOptions with_queries;
    with_queries.include_queries = true;
    const auto df_q = load_annotations(again, corpus, with_queries);
    CHECK(corpus.avg_no == doctest::Approx(7.0 / 5.0));
    CHECK(df_q.at("o9") == 1);
}

TEST_CASE("annotations for unknown texts or objects are skipped with warnings")
{
    auto corpus = small_corpus();
    const auto graph = KnowledgeGraph::from_parts({{"o1", "", 0}}, {});
    std::istringstream ann("zz\to1\nd1\to1\nd1\tmissing\nd1\tmissing\n");
    AnnotationOptions options;
    options.graph = &graph;
    Warnings w;
    load_annotations(ann, corpus, options, &w);
    CHECK(w.size() == 2);
    CHECK(corpus.objects_of("d1") == std::vector<std::string>{"o1"});

    std::istringstream bad("d1 o1\n");
    CHECK_THROWS_AS(load_annotations(bad, corpus), ParseError);
}

TEST_CASE("qrels parsing and relevance")
{
    const auto qrels = make_qrels("q1 0 d1 2\nq1 0 d2 0\nq1 0 d3 1\nq2 0 d1 0\n");
    CHECK(qrels.size() == 4);
    CHECK(qrels.grade("q1", "d1") == 2);
    CHECK_FALSE(qrels.grade("q1", "d9").has_value());
    CHECK(qrels.is_relevant("q1", "d3"));
    CHECK_FALSE(qrels.is_relevant("q1", "d2"));
    CHECK_FALSE(qrels.is_relevant("q1", "d9"));
    CHECK(qrels.relevant("q1") == std::vector<std::string>{"d1", "d3"});
    CHECK(qrels.relevant("q2").empty());

    CHECK_THROWS_AS(make_qrels("q1 0 d1 3\n"), ParseError);
    CHECK_THROWS_AS(make_qrels("q1 0 d1 1\nq1 0 d1 0\n"), ParseError);
    CHECK_THROWS_AS(make_qrels("q1 d1 1\n"), ParseError);

    std::ostringstream out;
    save_qrels(out, qrels);
    std::istringstream in(out.str());
    CHECK(load_qrels(in).all() == qrels.all());
}

TEST_CASE("training instances are well formed")
{
    // Each query: 2 relevant, 3 judged non-relevant, candidates with 4 unjudged docs.
    Qrels qrels;
    std::map<std::string, std::vector<std::string>> candidates;
    for (int q = 0; q < 6; ++q) {
        const std::string qid = "q" + std::to_string(q);
        qrels.add(qid, "r" + std::to_string(q) + "a", 2);
        qrels.add(qid, "r" + std::to_string(q) + "b", 1);
        for (int j = 0; j < 3; ++j) {
            qrels.add(qid, "n" + std::to_string(q) + std::to_string(j), 0);
        }
        for (int j = 0; j < 4; ++j) {
            candidates[qid].push_back("u" + std::to_string(j));
        }
        candidates[qid].push_back("r" + std::to_string(q) + "a");
    }
    for (std::size_t n : {1, 3, 4, 7}) {
        const auto instances = sample_training_instances(qrels, candidates, n, 11);
        CHECK(instances.size() == 12);
        for (const auto& inst : instances) {
            CHECK(qrels.is_relevant(inst.query, inst.positive));
            REQUIRE(inst.negatives.size() == n);
            REQUIRE(inst.unjudged.size() == n);
            CHECK(std::set<std::string>(inst.negatives.begin(), inst.negatives.end()).size() == n);
            std::size_t judged = 0;
            for (std::size_t i = 0; i < n; ++i) {
                CHECK_FALSE(qrels.is_relevant(inst.query, inst.negatives[i]));
                CHECK(inst.unjudged[i] == !qrels.grade(inst.query, inst.negatives[i]).has_value());
                judged += inst.unjudged[i] ? 0 : 1;
            }
            // Judged negatives are used before unjudged ones.
            CHECK(judged == std::min<std::size_t>(n, 3));
        }
        CHECK(sample_training_instances(qrels, candidates, n, 11).size() == instances.size());
    }

    Warnings w;
    CHECK(sample_training_instances(qrels, candidates, 8, 11, &w).empty());
    CHECK(w.size() == 6);
    CHECK_THROWS_AS(sample_training_instances(qrels, candidates, 0, 11), ConfigError);

    const std::vector<std::string> subset{"q2", "q4"};
    for (const auto& inst : sample_training_instances(qrels, candidates, 2, 11, nullptr, &subset)) {
        CHECK((inst.query == "q2" || inst.query == "q4"));
    }
}

TEST_CASE("folds partition the queries with balanced sizes")
{
    std::vector<std::string> ids;
    for (int i = 0; i < 11; ++i) {
        ids.push_back("q" + std::to_string(i));
    }
    const auto folds = split_folds(ids, 5, 3);
    std::multiset<std::size_t> sizes;
    std::set<std::string> seen;
    for (const auto& f : folds) {
        sizes.insert(f.size());
        for (const auto& q : f) {
            CHECK(seen.insert(q).second);
        }
    }
    CHECK(sizes == std::multiset<std::size_t>{2, 2, 2, 2, 3});
    CHECK(seen.size() == ids.size());
    CHECK(split_folds(ids, 5, 3) == folds);
    CHECK(split_folds(ids, 5, 4) != folds);
    CHECK_THROWS_AS(split_folds(ids, 1, 3), ConfigError);
    CHECK_THROWS_AS(split_folds({"a", "b"}, 3, 3), ConfigError);
}

TEST_CASE("input vector layout")
{
    const Vector xt{0.5, -1.0};
    KrVector kr{{2.0, 0.0, 3.0}, 4};
    const auto x = build_input_vector(xt, kr);
    CHECK(x.values == Vector{0.5, -1.0, 2.0, 0.0, 3.0});
    CHECK(x.text_dims == 2);
    CHECK(x.kr_part().size() == 3);
    CHECK(x.text_part()[1] == -1.0);

    CHECK(parse_representation("kr+p2v") == InputRepresentation::kr_p2v);
    CHECK(to_string(InputRepresentation::p2v) == "p2v");
    CHECK_THROWS_AS(parse_representation("lda"), ConfigError);
}

TEST_CASE("vector store checks and round trip")
{
    VectorStore store;
    store.set_query("q1", build_input_vector(Vector{0.1}, KrVector{{1.0 / 3.0, 2.0}, 1}));
    store.set_document("d1", build_input_vector(Vector{-0.25}, KrVector{{1e-300, 7.0}, 2}));
    CHECK(store.dims() == 3);
    CHECK_THROWS_AS(store.set_document("d2", build_input_vector(Vector{1.0}, KrVector{{1.0}, 1})), DimensionError);
    CHECK(store.document("nope") == nullptr);
    CHECK_THROWS_WITH_AS(store.require_query("nope"), doctest::Contains("nope"), LookupError);

    std::ostringstream out;
    save_vector_store(out, store);
    std::istringstream in(out.str());
    const auto back = load_vector_store(in);
    CHECK(back.require_query("q1").values == store.require_query("q1").values);
    CHECK(back.require_document("d1").values == store.require_document("d1").values);
    CHECK(back.require_document("d1").text_dims == 1);
}
