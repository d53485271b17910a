#include <cmath>
#include <sstream>

#include "doctest.h"

#include "dsrim/error.hpp"
#include "dsrim/embeddings.hpp"
#include "dsrim/random.hpp"

using namespace dsrim;

TEST_CASE("cosine reference values")
{
    CHECK(cosine(Vector{1, 1}, Vector{1, 0}) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(cosine(Vector{1, 0}, Vector{0, 1}) == 0.0);
    CHECK(cosine(Vector{3, -2, 5}, Vector{3, -2, 5}) == doctest::Approx(1.0));
    CHECK(cosine(Vector{0, 0}, Vector{1, 2}) == 0.0);
    CHECK_THROWS_AS(cosine(Vector{1, 2}, Vector{1, 2, 3}), DimensionError);
}

TEST_CASE("cosine is symmetric and scale invariant")
{
    Rng rng(2);
    for (int i = 0; i < 200; ++i) {
        Vector u(7);
        Vector v(7);
        for (std::size_t j = 0; j < 7; ++j) {
            u[j] = rng.uniform(-1, 1);
            v[j] = rng.uniform(-1, 1);
        }
        const double a = rng.uniform(0.01, 100.0);
        Vector au = u;
        for (auto& x : au) {
            x *= a;
        }
        CHECK(cosine(u, v) == cosine(v, u));
        CHECK(cosine(au, v) == doctest::Approx(cosine(u, v)).epsilon(1e-12));
        CHECK(std::abs(cosine(u, v)) <= 1.0);
    }
}

TEST_CASE("embedding table checks")
{
    EmbeddingTable t(3);
    t.set("a", {1, 2, 3});
    CHECK_THROWS_AS(t.set("b", {1, 2}), DimensionError);
    CHECK_THROWS_AS(t.set("c", {1, NAN, 3}), Error);
    CHECK_THROWS_WITH_AS(t.at("zz"), doctest::Contains("zz"), LookupError);
    CHECK(t.find("zz") == nullptr);
}

TEST_CASE("load_embeddings")
{
    std::istringstream ok("x\t1 2 3\ny\t-1.5e-3 2E2 0\n");
    const auto t = load_embeddings(ok);
    CHECK(t.dims() == 3);
    CHECK(t.at("y")[0] == doctest::Approx(-0.0015));
    CHECK(t.at("y")[1] == 200.0);

    std::istringstream bad("x\t1 2 3\ny\t1 2\n");
    try {
        load_embeddings(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    std::istringstream garbage("x\t1 two 3\n");
    CHECK_THROWS_AS(load_embeddings(garbage), ParseError);
}

TEST_CASE("embedding file round trip is bit-exact")
{
    Rng rng(8);
    EmbeddingTable t(5);
    for (int i = 0; i < 20; ++i) {
        Vector v(5);
        for (auto& x : v) {
            x = rng.uniform(-3, 3);
        }
        t.set("k" + std::to_string(i), v);
    }
    std::stringstream buffer;
    save_embeddings(buffer, t);
    const auto back = load_embeddings(buffer);
    CHECK(back.entries() == t.entries());
}

namespace {

std::map<std::string, std::vector<std::string>> toy_texts()
{
    return {
        {"shared1", {"apple", "banana", "cherry", "apple", "banana", "cherry", "date"}},
        {"shared2", {"apple", "banana", "cherry", "date", "banana", "apple", "cherry"}},
        {"other", {"engine", "wheel", "brake", "engine", "gear", "wheel", "brake"}},
        {"other2", {"gear", "engine", "brake", "wheel", "gear", "engine"}},
    };
}

PvDbowConfig toy_config()
{
    PvDbowConfig cfg;
    cfg.dims = 16;
    cfg.epochs = 60;
    cfg.seed = 4;
    return cfg;
}

}  // namespace

TEST_CASE("texts sharing tokens end up closer than disjoint texts")
{
    const auto model = train_doc_embeddings(toy_texts(), toy_config());
    const auto& v = model.vectors();
    CHECK(cosine(v.at("shared1"), v.at("shared2")) > cosine(v.at("shared1"), v.at("other")));
    CHECK(v.at("other").size() == 16);
}

TEST_CASE("training is deterministic and its loss settles")
{
    const auto a = train_doc_embeddings(toy_texts(), toy_config());
    const auto b = train_doc_embeddings(toy_texts(), toy_config());
    CHECK(a.vectors().entries() == b.vectors().entries());
    const auto& loss = a.epoch_losses();
    REQUIRE(loss.size() == 60);
    CHECK(loss.back() < loss.front());
    // first five epochs: each within 5% of the running mean of the earlier ones
    double mean = loss[0];
    for (std::size_t e = 1; e < 5; ++e) {
        CHECK(loss[e] <= mean * 1.05);
        mean = (mean * static_cast<double>(e) + loss[e]) / static_cast<double>(e + 1);
    }
}

TEST_CASE("degenerate corpora")
{
    PvDbowConfig cfg = toy_config();
    cfg.dims = 100;
    const auto single = train_doc_embeddings({{"d1", {"w"}}, {"d2", {"w"}}}, cfg);
    for (const auto& [key, v] : single.vectors().entries()) {
        CHECK(v.size() == 100);
        for (double x : v) {
            CHECK(std::isfinite(x));
        }
    }
    Warnings warnings;
    const auto with_empty = train_doc_embeddings({{"d1", {"w", "x"}}, {"d2", {}}}, cfg, &warnings);
    CHECK(norm(with_empty.vectors().at("d2")) == 0.0);
    CHECK(warnings.size() == 1);

    CHECK_THROWS_AS(train_doc_embeddings({{"d1", {"w"}}}, cfg), ConfigError);
    CHECK_THROWS_AS(train_doc_embeddings({{"d1", {}}, {"d2", {}}}, cfg), ConfigError);
}

TEST_CASE("inference against frozen word state")
{
    const auto cfg = toy_config();
    const auto model = train_doc_embeddings(toy_texts(), cfg);
    const auto texts = toy_texts();
    const Vector inferred = infer_text_vector(model, texts.at("shared1"), cfg);
    CHECK(cosine(inferred, model.vectors().at("shared1")) >= 0.5);
    CHECK(infer_text_vector(model, texts.at("shared1"), cfg) == inferred);

    Warnings warnings;
    CHECK(norm(infer_text_vector(model, {}, cfg, &warnings)) == 0.0);
    CHECK(norm(infer_text_vector(model, {"unseen", "words"}, cfg, &warnings)) == 0.0);
    CHECK(warnings.size() == 2);
}
