#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "dsrim/config.hpp"
#include "dsrim/error.hpp"
#include "dsrim/pipeline.hpp"
#include "dsrim/retrieval.hpp"

using namespace dsrim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("dsrim_tests_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

/// A small generated collection with a quick training schedule.
ExperimentConfig small_experiment(const fs::path& dir)
{
    SyntheticConfig synthetic;
    synthetic.topics = 4;
    synthetic.subtopics_per_topic = 3;
    synthetic.leaves_per_subtopic = 6;
    synthetic.documents = 90;
    synthetic.queries = 12;
    synthetic.background_words = 60;
    synthetic.generic_objects = 10;
    synthetic.cross_links = 6;
    synthetic.judged_negatives = 6;
    synthetic.seed = 5;
    write_synthetic_experiment(synthetic, dir);
    auto config = load_config_file(dir / "experiment.conf");
    config.k = 8;
    config.analysis_ks = {4, 8};
    config.analysis_pivots = 10;
    config.analysis_neighborhood = 3;
    config.dims = 16;
    config.pv_epochs = 5;
    config.epochs = 4;
    config.folds = 3;
    return config;
}

}  // namespace

TEST_CASE("configuration defaults")
{
    const ExperimentConfig c;
    CHECK(c.relation == "IS-A");
    CHECK(c.k == 200);
    CHECK(c.strategy == "centroid");
    CHECK(c.dims == 100);
    CHECK(c.representation == "kr+p2v");
    CHECK(c.alpha == 1.0);
    CHECK(c.n == 4);
    CHECK(c.batch == 5);
    CHECK(c.dropout == 0.3);
    CHECK(c.epochs == 50);
    CHECK(c.folds == 5);
    CHECK(c.top_candidates == 2000);
    CHECK(c.top_rerank == 1000);
    CHECK(c.bm25_k1 == 1.2);
    CHECK(c.bm25_b == 0.75);
    CHECK(c.analysis_neighborhood == 10);
    CHECK_FALSE(c.average_negatives);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("config values round trip through text")
{
    ExperimentConfig c;
    set_config_value(c, "k", "12");
    set_config_value(c, "dropout", " 0.125 ");
    set_config_value(c, "average_negatives", "true");
    set_config_value(c, "analysis_ks", "5,7");
    CHECK(c.k == 12);
    CHECK(c.dropout == 0.125);
    CHECK(c.average_negatives);
    CHECK(c.analysis_ks == std::vector<std::size_t>{5, 7});
    CHECK_THROWS_AS(set_config_value(c, "k", "many"), ConfigError);
    CHECK_THROWS_AS(set_config_value(c, "no_such_key", "1"), ConfigError);

    std::ostringstream out;
    write_config(out, c);
    std::istringstream in(out.str());
    const auto back = read_config(in);
    for (const auto& key : config_keys()) {
        CHECK(get_config_value(back, key) == get_config_value(c, key));
    }
    CHECK(config_hash(back) == config_hash(c));
    CHECK(config_hash(ExperimentConfig{}) != config_hash(c));

    std::istringstream commented("# comment\n\nk = 3\n");
    CHECK(read_config(commented).k == 3);
    std::istringstream broken("k 3\n");
    CHECK_THROWS_AS(read_config(broken), ParseError);
}

TEST_CASE("config validation")
{
    auto invalid = [](const std::string& key, const std::string& value) {
        ExperimentConfig c;
        set_config_value(c, key, value);
        CHECK_THROWS_AS(c.validate(), ConfigError);
    };
    invalid("k", "0");
    invalid("strategy", "median");
    invalid("representation", "lda");
    invalid("dropout", "1");
    invalid("folds", "1");
    invalid("alpha", "0");
    invalid("bm25_b", "1.5");
}

TEST_CASE("stages report the command that produces a missing artifact")
{
    const auto dir = scratch("missing");
    auto config = small_experiment(dir);
    try {
        cmd_build_referential(config);
        FAIL("expected a missing artifact");
    } catch (const MissingArtifactError& e) {
        CHECK(e.producer() == "build-graph");
    }
    cmd_build_graph(config);
    cmd_train_embeddings(config);
    cmd_build_referential(config);
    cmd_vectorize(config);
    try {
        cmd_evaluate(config);
        FAIL("expected a missing artifact");
    } catch (const MissingArtifactError& e) {
        CHECK(e.producer() == "train");
    }
    config.k = 0;
    CHECK_THROWS_AS(cmd_train(config), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("pipeline run on a small generated collection")
{
    const auto dir = scratch("pipeline");
    auto config = small_experiment(dir);
    const auto outcome = run_pipeline(config);
    CHECK_FALSE(outcome.summary.empty());

    const fs::path out = dir / "out";
    for (const char* name : {"graph.tsv", "referential.tsv", "vectors.tsv", "candidates.run", "folds.tsv",
                             "model.fold1.ckpt", "model.fold3.ckpt", "training_loss.tsv", "run.bm25", "run.dsrim",
                             "run.random", "evaluation.tsv", "per_query_ap.tsv", "separation.tsv",
                             "difficulty.tsv", "io_similarity.tsv"}) {
        CHECK_MESSAGE(fs::exists(out / name), name);
    }
    for (const auto& [name, command] : pipeline_commands()) {
        const auto manifest = slurp(out / (name + ".manifest"));
        CHECK(manifest.find("command=" + name) != std::string::npos);
        CHECK(manifest.find("config.k=8\n") != std::string::npos);
        CHECK(manifest.find("config_hash=" + config_hash(config)) != std::string::npos);
    }

    const auto evaluation = slurp(out / "evaluation.tsv");
    for (const char* system : {"bm25\tmean\t", "dsrim\tmean\t", "random\tmean\t"}) {
        CHECK(evaluation.find(system) != std::string::npos);
    }
    std::ifstream run_file(out / "run.dsrim");
    const auto run = read_trec_run(run_file);
    CHECK(run.size() == 12);
    for (const auto& [q, ranking] : run) {
        CHECK(ranking.size() <= config.top_rerank);
    }

    // Re-running one stage reproduces its outputs byte for byte.
    const auto before = slurp(out / "run.dsrim");
    cmd_evaluate(config);
    CHECK(slurp(out / "run.dsrim") == before);
    fs::remove_all(dir);
}
