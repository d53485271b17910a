#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsrim/corpus.hpp"
#include "dsrim/net.hpp"
#include "dsrim/retrieval.hpp"

namespace dsrim {

struct CrossValidationConfig {
    TrainConfig train;
    std::size_t folds = 5;
    std::size_t top_rerank = 1000;
    std::vector<std::size_t> hidden = {64, 64};
    std::size_t output_dim = 32;
    std::uint64_t seed = 1;
};

struct FoldResult {
    std::vector<std::string> test_queries;
    std::size_t training_instances = 0;
    SiameseParams params;
    std::vector<double> loss_history;
    Run run;
    double map = 0.0;
};

struct CrossValidationResult {
    std::vector<FoldResult> folds;
    /// Mean of the per-fold test MAPs.
    double mean_map = 0.0;
    /// Union of the fold test runs.
    Run run;
};

/// Seeds derived from the master seed for each fold stage.
struct FoldSeeds {
    std::uint64_t sampling;
    std::uint64_t init;
    std::uint64_t training;
};
std::uint64_t fold_split_seed(std::uint64_t seed);
FoldSeeds fold_seeds(std::uint64_t seed, std::size_t fold);

/// Judged queries (at least one relevant document) that have candidates.
std::vector<std::string> evaluable_queries(const Qrels& qrels, const std::map<std::string, std::vector<std::string>>& candidates);

/// Trains one model on the given queries and returns it with its loss history.
TrainResult train_model(const Qrels& qrels, const std::map<std::string, std::vector<std::string>>& candidates,
                        const VectorStore& vectors, const std::vector<std::string>& training_queries,
                        const CrossValidationConfig& config, const FoldSeeds& seeds, Warnings* warnings = nullptr,
                        std::size_t* instance_count = nullptr);

/// Re-ranks the candidates of each query with the model.
Run rerank_queries(const SiameseParams& model, const std::vector<std::string>& queries,
                   const std::map<std::string, std::vector<std::string>>& candidates, const VectorStore& vectors,
                   std::size_t top, Warnings* warnings = nullptr);

/// Folds are trained sequentially: fold f trains on the other folds' queries and
/// is evaluated by MAP on its own re-ranked candidates.
CrossValidationResult cross_validate(const Qrels& qrels,
                                     const std::map<std::string, std::vector<std::string>>& candidates,
                                     const VectorStore& vectors, const CrossValidationConfig& config,
                                     Warnings* warnings = nullptr);

enum class Difficulty { easy = 0, medium = 1, difficult = 2 };
std::string to_string(Difficulty difficulty);

/// 1-D k-means (k = 3) over baseline AP; classes ordered by descending centroid.
/// With fewer than three distinct values a warning is recorded and classes follow
/// value order (one value: medium; two: easy and difficult).
std::map<std::string, Difficulty> classify_query_difficulty(const std::map<std::string, double>& baseline_ap,
                                                            std::uint64_t seed, Warnings* warnings = nullptr);

struct DifficultyClassStats {
    Difficulty difficulty = Difficulty::easy;
    std::size_t queries = 0;
    double mean_words = 0.0;
    double mean_objects = 0.0;
    double baseline_map = 0.0;
    double model_map = 0.0;
    /// (model MAP - baseline MAP) / baseline MAP * 100 over the class; absent when baseline MAP is 0.
    std::optional<double> percent_change;
};

struct QueryDifficulty {
    std::string query;
    double baseline_ap = 0.0;
    double model_ap = 0.0;
    Difficulty difficulty = Difficulty::easy;
    std::size_t words = 0;
    std::size_t objects = 0;
};

struct DifficultyReport {
    std::vector<QueryDifficulty> queries;
    std::array<DifficultyClassStats, 3> classes;
};

DifficultyReport difficulty_report(const std::map<std::string, Difficulty>& classes,
                                   const std::map<std::string, double>& baseline_ap,
                                   const std::map<std::string, double>& model_ap, const Corpus& corpus);

}  // namespace dsrim
