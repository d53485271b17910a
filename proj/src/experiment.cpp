#include "dsrim/experiment.hpp"

#include <algorithm>
#include <set>

#include "dsrim/kmeans.hpp"
#include "dsrim/random.hpp"

namespace dsrim {

std::uint64_t fold_split_seed(std::uint64_t seed)
{
    return mix_seed(seed, 100);
}

FoldSeeds fold_seeds(std::uint64_t seed, std::size_t fold)
{
    return {mix_seed(seed, 200 + fold), mix_seed(seed, 300 + fold), mix_seed(seed, 400 + fold)};
}

std::vector<std::string> evaluable_queries(const Qrels& qrels,
                                           const std::map<std::string, std::vector<std::string>>& candidates)
{
    std::vector<std::string> queries;
    for (const auto& q : qrels.queries()) {
        const auto it = candidates.find(q);
        if (!qrels.relevant(q).empty() && it != candidates.end() && !it->second.empty()) {
            queries.push_back(q);
        }
    }
    return queries;
}

TrainResult train_model(const Qrels& qrels, const std::map<std::string, std::vector<std::string>>& candidates,
                        const VectorStore& vectors, const std::vector<std::string>& training_queries,
                        const CrossValidationConfig& config, const FoldSeeds& seeds, Warnings* warnings,
                        std::size_t* instance_count)
{
    const auto instances = sample_training_instances(qrels, candidates, config.train.n_negatives, seeds.sampling,
                                                     warnings, &training_queries);
    if (instance_count != nullptr) {
        *instance_count = instances.size();
    }
    SiameseParams params = init_params(vectors.dims(), seeds.init, config.hidden, config.output_dim);
    TrainConfig train_config = config.train;
    train_config.seed = seeds.training;
    return train(std::move(params), instances, vectors, train_config);
}

Run rerank_queries(const SiameseParams& model, const std::vector<std::string>& queries,
                   const std::map<std::string, std::vector<std::string>>& candidates, const VectorStore& vectors,
                   std::size_t top, Warnings* warnings)
{
    Run run;
    for (const auto& q : queries) {
        const auto it = candidates.find(q);
        if (it == candidates.end()) {
            continue;
        }
        run[q] = rerank(model, q, it->second, vectors, top, warnings);
    }
    return run;
}

CrossValidationResult cross_validate(const Qrels& qrels,
                                     const std::map<std::string, std::vector<std::string>>& candidates,
                                     const VectorStore& vectors, const CrossValidationConfig& config,
                                     Warnings* warnings)
{
    config.train.validate();
    const auto queries = evaluable_queries(qrels, candidates);
    const auto folds = split_folds(queries, config.folds, fold_split_seed(config.seed));

    CrossValidationResult result;
    double map_sum = 0.0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<std::string> training;
        for (std::size_t g = 0; g < folds.size(); ++g) {
            if (g != f) {
                training.insert(training.end(), folds[g].begin(), folds[g].end());
            }
        }
        FoldResult fold;
        fold.test_queries = folds[f];
        TrainResult trained = train_model(qrels, candidates, vectors, training, config, fold_seeds(config.seed, f),
                                          warnings, &fold.training_instances);
        fold.params = std::move(trained.params);
        fold.loss_history = std::move(trained.loss_history);
        fold.run = rerank_queries(fold.params, fold.test_queries, candidates, vectors, config.top_rerank, warnings);
        fold.map = mean_average_precision(fold.run, qrels, warnings).map;
        map_sum += fold.map;
        for (const auto& [q, ranking] : fold.run) {
            result.run[q] = ranking;
        }
        result.folds.push_back(std::move(fold));
    }
    result.mean_map = map_sum / static_cast<double>(folds.size());
    return result;
}

std::string to_string(Difficulty difficulty)
{
    switch (difficulty) {
    case Difficulty::easy:
        return "easy";
    case Difficulty::medium:
        return "medium";
    case Difficulty::difficult:
        return "difficult";
    }
    return "unknown";
}

std::map<std::string, Difficulty> classify_query_difficulty(const std::map<std::string, double>& baseline_ap,
                                                            std::uint64_t seed, Warnings* warnings)
{
    if (baseline_ap.size() < 3) {
        throw ConfigError("difficulty classification needs at least 3 queries");
    }
    std::map<std::string, Difficulty> classes;
    const std::set<double> distinct_set = [&] {
        std::set<double> s;
        for (const auto& [q, ap] : baseline_ap) {
            s.insert(ap);
        }
        return s;
    }();
    if (distinct_set.size() < 3) {
        warn(warnings, "only " + std::to_string(distinct_set.size()) +
                           " distinct AP values; difficulty classes assigned by value order");
        const std::vector<double> distinct(distinct_set.rbegin(), distinct_set.rend());
        for (const auto& [q, ap] : baseline_ap) {
            if (distinct.size() == 1) {
                classes[q] = Difficulty::medium;
            } else {
                classes[q] = ap == distinct.front() ? Difficulty::easy : Difficulty::difficult;
            }
        }
        return classes;
    }

    std::vector<std::string> ids;
    std::vector<Vector> points;
    for (const auto& [q, ap] : baseline_ap) {
        ids.push_back(q);
        points.push_back({ap});
    }
    const auto clustering = kmeans(points, 3, 100, seed);
    std::array<std::size_t, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return clustering.centroids[a][0] > clustering.centroids[b][0];
    });
    std::array<Difficulty, 3> label{};
    for (std::size_t rank = 0; rank < 3; ++rank) {
        label[order[rank]] = static_cast<Difficulty>(rank);
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
        classes[ids[i]] = label[clustering.assignments[i]];
    }
    return classes;
}

DifficultyReport difficulty_report(const std::map<std::string, Difficulty>& classes,
                                   const std::map<std::string, double>& baseline_ap,
                                   const std::map<std::string, double>& model_ap, const Corpus& corpus)
{
    DifficultyReport report;
    for (std::size_t c = 0; c < 3; ++c) {
        report.classes[c].difficulty = static_cast<Difficulty>(c);
    }
    std::array<double, 3> words{}, objects{}, base{}, model{};
    for (const auto& [q, cls] : classes) {
        QueryDifficulty row;
        row.query = q;
        row.difficulty = cls;
        if (const auto it = baseline_ap.find(q); it != baseline_ap.end()) {
            row.baseline_ap = it->second;
        }
        if (const auto it = model_ap.find(q); it != model_ap.end()) {
            row.model_ap = it->second;
        }
        if (const auto it = corpus.queries.find(q); it != corpus.queries.end()) {
            row.words = it->second.size();
        }
        row.objects = corpus.objects_of(q).size();
        const auto c = static_cast<std::size_t>(cls);
        ++report.classes[c].queries;
        words[c] += static_cast<double>(row.words);
        objects[c] += static_cast<double>(row.objects);
        base[c] += row.baseline_ap;
        model[c] += row.model_ap;
        report.queries.push_back(std::move(row));
    }
    for (std::size_t c = 0; c < 3; ++c) {
        auto& stats = report.classes[c];
        if (stats.queries == 0) {
            continue;
        }
        const auto n = static_cast<double>(stats.queries);
        stats.mean_words = words[c] / n;
        stats.mean_objects = objects[c] / n;
        stats.baseline_map = base[c] / n;
        stats.model_map = model[c] / n;
        if (stats.baseline_map > 0.0) {
            stats.percent_change = (stats.model_map - stats.baseline_map) / stats.baseline_map * 100.0;
        }
    }
    return report;
}

}  // namespace dsrim
