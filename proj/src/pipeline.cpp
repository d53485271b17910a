#include "dsrim/pipeline.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "dsrim/analysis.hpp"
#include "dsrim/corpus.hpp"
#include "dsrim/embeddings.hpp"
#include "dsrim/experiment.hpp"
#include "dsrim/kgraph.hpp"
#include "dsrim/net.hpp"
#include "dsrim/random.hpp"
#include "dsrim/relmap.hpp"
#include "dsrim/retrieval.hpp"
#include "dsrim/text.hpp"

namespace dsrim {

namespace {

namespace fs = std::filesystem;

// Seed offsets per stage; folds use their own offsets in the experiment driver.
constexpr std::uint64_t kEmbeddingSeed = 10;
constexpr std::uint64_t kReferentialSeed = 20;
constexpr std::uint64_t kPivotSeed = 500;
constexpr std::uint64_t kDifficultySeed = 600;
constexpr std::uint64_t kRandomRunSeed = 700;

constexpr const char* kGraph = "graph.tsv";
constexpr const char* kDocVectors = "doc_vectors.tsv";
constexpr const char* kQueryVectors = "query_vectors.tsv";
constexpr const char* kObjectVectors = "object_vectors.tsv";
constexpr const char* kReferential = "referential.tsv";
constexpr const char* kInputVectors = "vectors.tsv";
constexpr const char* kCandidates = "candidates.run";
constexpr const char* kFolds = "folds.tsv";
constexpr const char* kRunBm25 = "run.bm25";
constexpr const char* kRunDsrim = "run.dsrim";

std::string checkpoint_name(std::size_t fold) { return "model.fold" + std::to_string(fold + 1) + ".ckpt"; }

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string content_hash(const std::string& bytes) { return hex64(fnv1a(bytes)); }

/// Collects the provenance of one command run.
class Manifest {
  public:
    Manifest(std::string command, const ExperimentConfig& config) : m_command(std::move(command)), m_config(config) {}

    void input(const std::string& name, const std::string& bytes) { m_inputs.emplace_back(name, content_hash(bytes)); }

    void output(const std::string& name, const std::string& bytes) { m_outputs.emplace_back(name, content_hash(bytes)); }

    std::string render() const
    {
        std::ostringstream out;
        out << "command=" << m_command << '\n';
        out << "config_hash=" << config_hash(m_config) << '\n';
        out << "seed=" << m_config.seed << '\n';
        for (const auto& key : config_keys()) {
            out << "config." << key << '=' << get_config_value(m_config, key) << '\n';
        }
        for (const auto& [name, hash] : m_inputs) {
            out << "input." << name << '=' << hash << '\n';
        }
        for (const auto& [name, hash] : m_outputs) {
            out << "output." << name << '=' << hash << '\n';
        }
        return out.str();
    }

  private:
    std::string m_command;
    const ExperimentConfig& m_config;
    std::vector<std::pair<std::string, std::string>> m_inputs;
    std::vector<std::pair<std::string, std::string>> m_outputs;
};

/// Shared state of one command invocation.
class Stage {
  public:
    Stage(std::string command, const ExperimentConfig& config)
        : m_command(command), m_config(config), m_manifest(std::move(command), config)
    {
        config.validate();
        m_out = config.resolve(config.output_dir);
    }

    Warnings& warnings() { return m_warnings; }

    /// A user-supplied input file named by a config key.
    std::string input(const std::string& key)
    {
        const std::string value = get_config_value(m_config, key);
        if (value.empty()) {
            throw ConfigError("config key '" + key + "' is required by " + m_command);
        }
        const fs::path path = m_config.resolve(value);
        if (!fs::exists(path)) {
            throw Error("input '" + key + "' not found: " + path.string());
        }
        std::string bytes = read_file(path);
        m_manifest.input(key, bytes);
        return bytes;
    }

    /// An artifact produced by an earlier command.
    std::string artifact(const std::string& name, const std::string& producer)
    {
        const fs::path path = m_out / name;
        if (!fs::exists(path)) {
            throw MissingArtifactError(name, producer);
        }
        std::string bytes = read_file(path);
        m_manifest.input(name, bytes);
        return bytes;
    }

    void write(const std::string& name, const std::string& bytes)
    {
        fs::create_directories(m_out);
        std::ofstream out(m_out / name, std::ios::binary);
        if (!out) {
            throw Error("cannot write " + (m_out / name).string());
        }
        out << bytes;
        m_manifest.output(name, bytes);
    }

    void summary(std::string line) { m_outcome.summary.push_back(std::move(line)); }

    CommandOutcome finish()
    {
        write_manifest();
        m_outcome.warnings = m_warnings.messages();
        return std::move(m_outcome);
    }

  private:
    void write_manifest()
    {
        fs::create_directories(m_out);
        std::ofstream out(m_out / (m_command + ".manifest"), std::ios::binary);
        out << m_manifest.render();
    }

    std::string m_command;
    const ExperimentConfig& m_config;
    Manifest m_manifest;
    fs::path m_out;
    Warnings m_warnings;
    CommandOutcome m_outcome;
};

template <typename Save, typename Value>
std::string render(Save save, const Value& value)
{
    std::ostringstream out;
    save(out, value);
    return out.str();
}

KnowledgeGraph read_graph(Stage& stage)
{
    std::istringstream in(stage.artifact(kGraph, "build-graph"));
    return load_graph_cache(in);
}

EmbeddingTable read_table(Stage& stage, const char* name)
{
    std::istringstream in(stage.artifact(name, "train-embeddings"));
    return load_embeddings(in);
}

/// Corpus with annotations; returns df over documents (and queries when configured).
std::pair<Corpus, std::map<std::string, std::size_t>> read_corpus(Stage& stage, const ExperimentConfig& config,
                                                                 const KnowledgeGraph* graph)
{
    std::istringstream docs(stage.input("documents"));
    std::istringstream queries(stage.input("queries"));
    Corpus corpus = load_corpus(docs, queries, &stage.warnings());
    std::istringstream annotations(stage.input("annotations"));
    AnnotationOptions options;
    options.include_queries = config.include_query_annotations;
    options.graph = graph;
    auto df = load_annotations(annotations, corpus, options, &stage.warnings());
    return {std::move(corpus), std::move(df)};
}

Qrels read_qrels(Stage& stage)
{
    std::istringstream in(stage.input("qrels"));
    return load_qrels(in);
}

std::map<std::string, std::vector<std::string>> candidate_lists(const Run& run)
{
    std::map<std::string, std::vector<std::string>> lists;
    for (const auto& [query, ranking] : run) {
        lists[query] = doc_ids(ranking);
    }
    return lists;
}

std::vector<std::vector<std::string>> read_folds(Stage& stage)
{
    std::istringstream in(stage.artifact(kFolds, "train"));
    std::vector<std::vector<std::string>> folds;
    std::string line;
    std::size_t line_no = 0;
    while (read_line(in, line, line_no)) {
        if (is_comment_or_blank(line)) {
            continue;
        }
        const auto fields = split(line, '\t');
        const auto fold = fields.size() == 2 ? parse_int(fields[0]) : std::nullopt;
        if (!fold || *fold < 1) {
            throw ParseError(line_no, "fold row must be 'fold<TAB>query-id'");
        }
        if (folds.size() < static_cast<std::size_t>(*fold)) {
            folds.resize(static_cast<std::size_t>(*fold));
        }
        folds[static_cast<std::size_t>(*fold) - 1].emplace_back(fields[1]);
    }
    return folds;
}

std::vector<SiameseParams> read_checkpoints(Stage& stage, std::size_t folds)
{
    std::vector<SiameseParams> models;
    for (std::size_t f = 0; f < folds; ++f) {
        std::istringstream in(stage.artifact(checkpoint_name(f), "train"));
        models.push_back(load_checkpoint(in));
    }
    return models;
}

Run read_run(Stage& stage, const char* name, const std::string& producer)
{
    std::istringstream in(stage.artifact(name, producer));
    return read_trec_run(in);
}

VectorStore read_vectors(Stage& stage)
{
    std::istringstream in(stage.artifact(kInputVectors, "vectorize"));
    return load_vector_store(in);
}

RepresentativeStrategy strategy_of(const ExperimentConfig& config) { return parse_strategy(config.strategy); }

Referential make_referential(const KnowledgeGraph& graph, const EmbeddingTable& object_vectors, std::size_t k,
                             RepresentativeStrategy strategy, const ExperimentConfig& config)
{
    std::map<std::string, std::size_t> df;
    std::vector<std::string> objects;
    for (const auto& node : graph.objects()) {
        df[node.id] = node.df;
        if (object_vectors.contains(node.id)) {
            objects.push_back(node.id);
        }
    }
    if (strategy == RepresentativeStrategy::top_concepts) {
        return top_concepts_referential(objects, df, k, &object_vectors);
    }
    return build_referential(objects, object_vectors, k, strategy, df, mix_seed(config.seed, kReferentialSeed),
                             config.kmeans_max_iter);
}

std::string fixed(double value)
{
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.4f", value);
    return buffer;
}

}  // namespace

CommandOutcome cmd_build_graph(const ExperimentConfig& config)
{
    Stage stage("build-graph", config);
    std::istringstream nodes(stage.input("nodes"));
    std::istringstream edges(stage.input("edges"));
    KnowledgeGraph graph = load_graph(nodes, edges, config.relation);
    const auto [corpus, df] = read_corpus(stage, config, &graph);
    graph.set_document_frequencies(df);
    stage.write(kGraph, render(save_graph, graph));
    stage.summary("graph: " + std::to_string(graph.size()) + " objects, " + std::to_string(graph.edges().size()) +
                  " edges, max depth " + std::to_string(graph.max_depth()));
    return stage.finish();
}

CommandOutcome cmd_train_embeddings(const ExperimentConfig& config)
{
    Stage stage("train-embeddings", config);
    const KnowledgeGraph graph = read_graph(stage);
    const auto [corpus, df] = read_corpus(stage, config, &graph);

    // Documents, queries and object labels share one embedding space.
    std::map<std::string, std::vector<std::string>> texts;
    for (const auto& [id, tokens] : corpus.documents) {
        texts["d:" + id] = tokens;
    }
    for (const auto& [id, tokens] : corpus.queries) {
        texts["q:" + id] = tokens;
    }
    std::optional<EmbeddingTable> precomputed;
    if (!config.object_embeddings.empty()) {
        std::istringstream in(stage.input("object_embeddings"));
        precomputed = load_embeddings(in);
    } else {
        for (const auto& node : graph.objects()) {
            texts["o:" + node.id] = tokenize(node.label);
        }
    }

    PvDbowConfig pv;
    pv.dims = config.dims;
    pv.epochs = config.pv_epochs;
    pv.negatives_per_target = config.pv_negatives;
    pv.learning_rate = config.pv_learning_rate;
    pv.seed = mix_seed(config.seed, kEmbeddingSeed);
    const DocEmbeddingModel model = train_doc_embeddings(texts, pv, &stage.warnings());

    EmbeddingTable docs(config.dims);
    EmbeddingTable queries(config.dims);
    EmbeddingTable objects(config.dims);
    for (const auto& [key, values] : model.vectors().entries()) {
        const std::string id = key.substr(2);
        switch (key[0]) {
        case 'd': docs.set(id, values); break;
        case 'q': queries.set(id, values); break;
        default: objects.set(id, values); break;
        }
    }
    if (precomputed) {
        objects = std::move(*precomputed);
    }
    stage.write(kDocVectors, render(save_embeddings, docs));
    stage.write(kQueryVectors, render(save_embeddings, queries));
    stage.write(kObjectVectors, render(save_embeddings, objects));

    std::string losses = "epoch\tloss\n";
    for (std::size_t e = 0; e < model.epoch_losses().size(); ++e) {
        losses += std::to_string(e + 1) + '\t' + format_double(model.epoch_losses()[e]) + '\n';
    }
    stage.write("embedding_loss.tsv", losses);
    stage.summary("embeddings: " + std::to_string(docs.size()) + " documents, " + std::to_string(queries.size()) +
                  " queries, " + std::to_string(objects.size()) + " objects, vocabulary " +
                  std::to_string(model.vocabulary_size()));
    return stage.finish();
}

CommandOutcome cmd_build_referential(const ExperimentConfig& config)
{
    Stage stage("build-referential", config);
    const KnowledgeGraph graph = read_graph(stage);
    const EmbeddingTable objects = read_table(stage, kObjectVectors);
    const Referential referential = make_referential(graph, objects, config.k, strategy_of(config), config);
    stage.write(kReferential, render(save_referential, referential));
    stage.summary("referential: k=" + std::to_string(referential.k()) + " strategy=" + config.strategy);
    return stage.finish();
}

CommandOutcome cmd_vectorize(const ExperimentConfig& config)
{
    Stage stage("vectorize", config);
    const KnowledgeGraph graph = read_graph(stage);
    const EmbeddingTable docs = read_table(stage, kDocVectors);
    const EmbeddingTable queries = read_table(stage, kQueryVectors);
    const EmbeddingTable objects = read_table(stage, kObjectVectors);
    std::istringstream ref_in(stage.artifact(kReferential, "build-referential"));
    const Referential referential = load_referential(ref_in);
    const auto [corpus, df] = read_corpus(stage, config, &graph);
    const auto representation = parse_representation(config.representation);
    const KrEncoder encoder(referential, graph, objects, corpus.avg_no);

    std::size_t unannotated = 0;
    auto build = [&](const std::string& id, const EmbeddingTable& text_vectors) {
        Vector text;
        if (representation != InputRepresentation::kr) {
            text = text_vectors.at(id);
        }
        KrVector kr;
        if (representation != InputRepresentation::p2v) {
            const auto& objs = corpus.objects_of(id);
            unannotated += objs.empty() ? 1 : 0;
            kr = encoder.encode(objs);
        }
        return build_input_vector(text, kr);
    };
    VectorStore store;
    for (const auto& [id, tokens] : corpus.documents) {
        store.set_document(id, build(id, docs));
    }
    for (const auto& [id, tokens] : corpus.queries) {
        store.set_query(id, build(id, queries));
    }
    if (unannotated > 0) {
        stage.warnings().add(std::to_string(unannotated) + " texts have no annotated objects; their x^KR is zero");
    }
    stage.write(kInputVectors, render(save_vector_store, store));
    stage.summary("vectors: " + std::to_string(store.documents().size()) + " documents, " +
                  std::to_string(store.queries().size()) + " queries, input dimension " +
                  std::to_string(store.dims()) + " (" + config.representation + ")");
    return stage.finish();
}

CommandOutcome cmd_train(const ExperimentConfig& config)
{
    Stage stage("train", config);
    const VectorStore store = read_vectors(stage);
    const auto [corpus, df] = read_corpus(stage, config, nullptr);
    const Qrels qrels = read_qrels(stage);

    const InvertedIndex index = build_index(corpus);
    const Bm25Params bm25{config.bm25_k1, config.bm25_b};
    Run candidates;
    for (const auto& [id, tokens] : corpus.queries) {
        candidates[id] = bm25_rank(index, tokens, config.top_candidates, bm25, &stage.warnings());
    }
    stage.write(kCandidates, render([](std::ostream& o, const Run& r) { write_trec_run(o, r, "bm25"); }, candidates));

    CrossValidationConfig cv;
    cv.train.alpha = config.alpha;
    cv.train.n_negatives = config.n;
    cv.train.batch_size = config.batch;
    cv.train.dropout = config.dropout;
    cv.train.epochs = config.epochs;
    cv.train.learning_rate = config.learning_rate;
    cv.train.average_negatives = config.average_negatives;
    cv.train.seed = config.seed;
    cv.folds = config.folds;
    cv.top_rerank = config.top_rerank;
    cv.seed = config.seed;
    const CrossValidationResult result = cross_validate(qrels, candidate_lists(candidates), store, cv,
                                                        &stage.warnings());

    std::string folds = "# fold\tquery\n";
    std::string losses = "fold\tepoch\tloss\n";
    for (std::size_t f = 0; f < result.folds.size(); ++f) {
        const FoldResult& fold = result.folds[f];
        for (const auto& q : fold.test_queries) {
            folds += std::to_string(f + 1) + '\t' + q + '\n';
        }
        for (std::size_t e = 0; e < fold.loss_history.size(); ++e) {
            losses += std::to_string(f + 1) + '\t' + std::to_string(e + 1) + '\t' +
                      format_double(fold.loss_history[e]) + '\n';
        }
        TrainConfig trained = cv.train;
        trained.seed = fold_seeds(config.seed, f).training;
        stage.write(checkpoint_name(f),
                    render([&](std::ostream& o, const SiameseParams& p) { save_checkpoint(o, p, trained); },
                           fold.params));
        stage.summary("fold " + std::to_string(f + 1) + ": " + std::to_string(fold.training_instances) +
                      " training instances, final loss " +
                      (fold.loss_history.empty() ? std::string("n/a") : fixed(fold.loss_history.back())));
    }
    stage.write(kFolds, folds);
    stage.write("training_loss.tsv", losses);
    return stage.finish();
}

CommandOutcome cmd_evaluate(const ExperimentConfig& config)
{
    Stage stage("evaluate", config);
    const auto folds = read_folds(stage);
    const auto models = read_checkpoints(stage, folds.size());
    const Run candidates = read_run(stage, kCandidates, "train");
    const VectorStore store = read_vectors(stage);
    const Qrels qrels = read_qrels(stage);
    const auto lists = candidate_lists(candidates);
    const std::uint64_t random_seed = mix_seed(config.seed, kRandomRunSeed);

    Run bm25;
    Run dsrim;
    Run random;
    std::vector<std::array<double, 3>> fold_maps;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        Run fb;
        Run fd;
        Run fr;
        for (const auto& q : folds[f]) {
            const auto it = candidates.find(q);
            if (it == candidates.end()) {
                continue;
            }
            Ranking top = it->second;
            if (top.size() > config.top_rerank) {
                top.resize(config.top_rerank);
            }
            fb[q] = std::move(top);
            fd[q] = rerank(models[f], q, lists.at(q), store, config.top_rerank, &stage.warnings());
            fr[q] = random_rerank(lists.at(q), config.top_rerank, mix_seed(random_seed, fnv1a(q)));
        }
        fold_maps.push_back({mean_average_precision(fb, qrels, &stage.warnings()).map,
                             mean_average_precision(fd, qrels).map, mean_average_precision(fr, qrels).map});
        bm25.merge(fb);
        dsrim.merge(fd);
        random.merge(fr);
    }
    auto run_text = [](const Run& run, const char* tag) {
        std::ostringstream out;
        write_trec_run(out, run, tag);
        return out.str();
    };
    stage.write(kRunBm25, run_text(bm25, "bm25"));
    stage.write(kRunDsrim, run_text(dsrim, "dsrim"));
    stage.write("run.random", run_text(random, "random"));

    const char* systems[] = {"bm25", "dsrim", "random"};
    std::string table = "system\tfold\tmap\n";
    std::array<double, 3> mean{};
    for (std::size_t s = 0; s < 3; ++s) {
        for (std::size_t f = 0; f < fold_maps.size(); ++f) {
            table += std::string(systems[s]) + '\t' + std::to_string(f + 1) + '\t' + format_double(fold_maps[f][s]) +
                     '\n';
            mean[s] += fold_maps[f][s] / static_cast<double>(fold_maps.size());
        }
    }
    for (std::size_t s = 0; s < 3; ++s) {
        table += std::string(systems[s]) + "\tmean\t" + format_double(mean[s]) + '\n';
        stage.summary(std::string(systems[s]) + " mean MAP " + fixed(mean[s]));
    }
    stage.write("evaluation.tsv", table);

    const auto ap_b = mean_average_precision(bm25, qrels).per_query;
    const auto ap_d = mean_average_precision(dsrim, qrels).per_query;
    const auto ap_r = mean_average_precision(random, qrels).per_query;
    std::string per_query = "query\tfold\tbm25\tdsrim\trandom\n";
    for (std::size_t f = 0; f < folds.size(); ++f) {
        for (const auto& q : folds[f]) {
            if (ap_b.count(q) == 0) {
                continue;
            }
            per_query += q + '\t' + std::to_string(f + 1) + '\t' + format_double(ap_b.at(q)) + '\t' +
                         format_double(ap_d.at(q)) + '\t' + format_double(ap_r.at(q)) + '\n';
        }
    }
    stage.write("per_query_ap.tsv", per_query);
    return stage.finish();
}

CommandOutcome cmd_analyze_repr(const ExperimentConfig& config)
{
    Stage stage("analyze-repr", config);
    const KnowledgeGraph graph = read_graph(stage);
    const EmbeddingTable objects = read_table(stage, kObjectVectors);
    const auto [corpus, df] = read_corpus(stage, config, &graph);
    std::map<std::string, std::size_t> graph_df;
    for (const auto& node : graph.objects()) {
        if (node.df > 0) {
            graph_df[node.id] = node.df;
        }
    }
    const auto idf = idf_from_df(graph_df, corpus.documents.size());

    std::vector<std::unique_ptr<Referential>> referentials;
    std::vector<std::unique_ptr<KrEncoder>> encoders;
    std::vector<ReprVariant> variants;
    const RepresentativeStrategy strategies[] = {RepresentativeStrategy::idf_min, RepresentativeStrategy::idf_max,
                                                 RepresentativeStrategy::centroid,
                                                 RepresentativeStrategy::top_concepts};
    for (const auto k : config.analysis_ks) {
        for (const auto strategy : strategies) {
            referentials.push_back(
                std::make_unique<Referential>(make_referential(graph, objects, k, strategy, config)));
            encoders.push_back(std::make_unique<KrEncoder>(*referentials.back(), graph, objects, corpus.avg_no));
            const KrEncoder* encoder = encoders.back().get();
            ReprVariant variant;
            variant.label = strategy == RepresentativeStrategy::top_concepts ? "top_concepts" : "clustering";
            variant.k = k;
            variant.strategy = to_string(strategy);
            variant.build = [encoder](const std::vector<std::string>& objs) { return encoder->encode(objs).values; };
            variants.push_back(std::move(variant));
        }
    }
    const SeparationReport report =
        pivotal_experiment(variants, corpus, graph, idf, config.analysis_pivots, config.analysis_neighborhood,
                           mix_seed(config.seed, kPivotSeed), &stage.warnings());
    stage.write("separation.tsv", render(write_separation_tsv, report));
    stage.write("separation.txt", render(write_separation_table, report));
    for (const auto& row : report.rows) {
        stage.summary(row.label + " k=" + std::to_string(row.k) + " " + row.strategy + ": diff " + fixed(row.diff));
    }
    return stage.finish();
}

CommandOutcome cmd_difficulty(const ExperimentConfig& config)
{
    Stage stage("difficulty", config);
    const Run bm25 = read_run(stage, kRunBm25, "evaluate");
    const Run dsrim = read_run(stage, kRunDsrim, "evaluate");
    const auto folds = read_folds(stage);
    const auto models = read_checkpoints(stage, folds.size());
    const VectorStore store = read_vectors(stage);
    const auto [corpus, df] = read_corpus(stage, config, nullptr);
    const Qrels qrels = read_qrels(stage);

    const auto baseline = mean_average_precision(bm25, qrels, &stage.warnings()).per_query;
    const auto model = mean_average_precision(dsrim, qrels).per_query;
    const auto classes = classify_query_difficulty(baseline, mix_seed(config.seed, kDifficultySeed),
                                                   &stage.warnings());
    const DifficultyReport report = difficulty_report(classes, baseline, model, corpus);
    stage.write("difficulty.tsv", render(write_difficulty_tsv, report));
    stage.write("difficulty.txt", render(write_difficulty_table, report));

    // Each query's relevant pairs are projected by the model of the fold that held it out.
    IoSimilarityReport total;
    double in_sum = 0.0;
    double out_sum = 0.0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<std::pair<std::string, std::string>> pairs;
        for (const auto& q : folds[f]) {
            for (const auto& d : qrels.relevant(q)) {
                pairs.emplace_back(q, d);
            }
        }
        const IoSimilarityReport part = io_similarity_report(models[f], pairs, store);
        total.pairs += part.pairs;
        in_sum += part.input_cosine * static_cast<double>(part.pairs);
        out_sum += part.output_cosine * static_cast<double>(part.pairs);
    }
    if (total.pairs > 0) {
        total.input_cosine = in_sum / static_cast<double>(total.pairs);
        total.output_cosine = out_sum / static_cast<double>(total.pairs);
        if (total.input_cosine != 0.0) {
            total.improvement = (total.output_cosine - total.input_cosine) / std::abs(total.input_cosine);
        }
    }
    stage.write("io_similarity.tsv", render(write_io_similarity_tsv, total));
    for (const auto& c : report.classes) {
        stage.summary(to_string(c.difficulty) + ": " + std::to_string(c.queries) + " queries, %Change " +
                      (c.percent_change ? fixed(*c.percent_change) : std::string("n/a")));
    }
    return stage.finish();
}

const std::vector<std::pair<std::string, Command>>& pipeline_commands()
{
    static const std::vector<std::pair<std::string, Command>> commands = {
        {"build-graph", &cmd_build_graph},     {"train-embeddings", &cmd_train_embeddings},
        {"build-referential", &cmd_build_referential}, {"vectorize", &cmd_vectorize},
        {"train", &cmd_train},                 {"evaluate", &cmd_evaluate},
        {"analyze-repr", &cmd_analyze_repr},   {"difficulty", &cmd_difficulty},
    };
    return commands;
}

CommandOutcome run_pipeline(const ExperimentConfig& config)
{
    config.validate();
    CommandOutcome all;
    for (const auto& [name, command] : pipeline_commands()) {
        CommandOutcome outcome = command(config);
        for (auto& w : outcome.warnings) {
            all.warnings.push_back(name + ": " + w);
        }
        for (auto& s : outcome.summary) {
            all.summary.push_back(name + ": " + s);
        }
    }
    return all;
}

ExperimentConfig synthetic_experiment_config(std::uint64_t seed)
{
    ExperimentConfig config;
    config.nodes = "nodes.tsv";
    config.edges = "edges.tsv";
    config.documents = "documents.jsonl";
    config.queries = "queries.jsonl";
    config.annotations = "annotations.tsv";
    config.qrels = "qrels.txt";
    config.output_dir = "out";
    config.k = 40;
    config.analysis_ks = {20, 40};
    config.analysis_pivots = 50;
    // Input vectors here are unnormalized with x^KR norms around 20, so plain SGD needs a small step.
    config.learning_rate = 3e-5;
    config.seed = seed;
    return config;
}

void write_synthetic_experiment(const SyntheticConfig& synthetic, const std::filesystem::path& directory)
{
    write_fixture(generate_fixture(synthetic), directory);
    std::ofstream out(directory / "experiment.conf", std::ios::binary);
    if (!out) {
        throw Error("cannot write " + (directory / "experiment.conf").string());
    }
    out << "# generated collection: " << synthetic.documents << " documents, " << synthetic.queries << " queries\n";
    write_config(out, synthetic_experiment_config(synthetic.seed));
}

}  // namespace dsrim
