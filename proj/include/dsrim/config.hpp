#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace dsrim {

/// Every setting of an experiment. Defaults are sized for a full-scale collection.
struct ExperimentConfig {
    // inputs
    std::string nodes;
    std::string edges;
    std::string documents;
    std::string queries;
    std::string annotations;
    std::string qrels;
    /// Optional precomputed object vectors; when empty they are trained from object labels.
    std::string object_embeddings;
    std::string output_dir = "out";

    std::string relation = "IS-A";
    bool include_query_annotations = false;

    std::size_t k = 200;
    std::string strategy = "centroid";
    std::size_t kmeans_max_iter = 100;

    std::size_t dims = 100;
    std::size_t pv_epochs = 20;
    std::size_t pv_negatives = 5;
    double pv_learning_rate = 0.025;

    std::string representation = "kr+p2v";
    double alpha = 1.0;
    std::size_t n = 4;
    std::size_t batch = 5;
    double dropout = 0.3;
    std::size_t epochs = 50;
    double learning_rate = 0.01;
    bool average_negatives = false;

    std::size_t folds = 5;
    std::size_t top_candidates = 2000;
    std::size_t top_rerank = 1000;
    double bm25_k1 = 1.2;
    double bm25_b = 0.75;

    std::size_t analysis_pivots = 100;
    std::size_t analysis_neighborhood = 10;
    std::vector<std::size_t> analysis_ks = {100, 200};

    std::uint64_t seed = 1;

    /// Relative paths are resolved against this directory (the config file's
    /// directory when loaded from a file). Not part of the serialized config.
    std::filesystem::path base_dir;

    std::filesystem::path resolve(const std::string& path) const;

    /// Raises ConfigError describing the first violated constraint.
    void validate() const;
};

/// Keys in canonical order.
const std::vector<std::string>& config_keys();

/// Raises ConfigError on an unknown key or an unparsable value.
void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);
std::string get_config_value(const ExperimentConfig& config, const std::string& key);

/// `key = value` lines; '#' starts a comment line.
ExperimentConfig read_config(std::istream& in);
ExperimentConfig load_config_file(const std::filesystem::path& path);
/// Canonical form: every key in canonical order.
void write_config(std::ostream& out, const ExperimentConfig& config);
std::string canonical_config(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

}  // namespace dsrim
