#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "dsrim/corpus.hpp"
#include "dsrim/experiment.hpp"
#include "dsrim/kgraph.hpp"
#include "dsrim/net.hpp"

namespace dsrim {

/// idf(o) = ln(N / df(o)) for every object with df >= 1.
std::map<std::string, double> idf_from_df(const std::map<std::string, std::size_t>& df, std::size_t document_count);

/// Object-level Corley similarity: for each object of one side, its best Leacock
/// relatedness to the other side (normalized by ln(2 * max_depth)), weighted by
/// idf and averaged; the two directions are averaged. When every weight of a side
/// is zero, that side uses the unweighted mean. Raises Error on an empty side and
/// LookupError for an object without idf.
double corley_sim(const std::vector<std::string>& a, const std::vector<std::string>& b, const KnowledgeGraph& graph,
                  const std::map<std::string, double>& idf);
double corley_sim(const std::vector<std::string>& a, const std::vector<std::string>& b,
                  const RelatednessCache& relatedness, const std::map<std::string, double>& idf);

/// One representation compared in the pivot experiment.
struct ReprVariant {
    std::string label;
    std::size_t k = 0;
    std::string strategy;
    /// Maps O(T) of a document to its x^KR.
    std::function<Vector(const std::vector<std::string>&)> build;
};

struct SeparationRow {
    std::string label;
    std::size_t k = 0;
    std::string strategy;
    double top = 0.0;
    double less = 0.0;
    double diff = 0.0;
};

struct SeparationReport {
    std::vector<SeparationRow> rows;
    std::size_t pivots = 0;
    std::size_t neighborhood = 0;
    std::uint64_t seed = 0;
};

/// For each sampled pivot among annotated documents, ranks every other annotated
/// document by Corley similarity (ties by ascending id), takes the `neighborhood`
/// most and least similar, and averages cosine(x^KR(pivot), x^KR(doc)) per variant.
SeparationReport pivotal_experiment(const std::vector<ReprVariant>& variants, const Corpus& corpus,
                                    const KnowledgeGraph& graph, const std::map<std::string, double>& idf,
                                    std::size_t n_pivots, std::size_t neighborhood, std::uint64_t seed,
                                    Warnings* warnings = nullptr);

struct IoSimilarityReport {
    std::size_t pairs = 0;
    double input_cosine = 0.0;
    double output_cosine = 0.0;
    /// (output - input) / |input|; absent when the input mean is 0.
    std::optional<double> improvement;
};

IoSimilarityReport io_similarity_report(const SiameseParams& model,
                                        const std::vector<std::pair<std::string, std::string>>& relevant_pairs,
                                        const VectorStore& vectors);

void write_separation_tsv(std::ostream& out, const SeparationReport& report);
void write_separation_table(std::ostream& out, const SeparationReport& report);
void write_difficulty_tsv(std::ostream& out, const DifficultyReport& report);
void write_difficulty_table(std::ostream& out, const DifficultyReport& report);
void write_io_similarity_tsv(std::ostream& out, const IoSimilarityReport& report);

}  // namespace dsrim
