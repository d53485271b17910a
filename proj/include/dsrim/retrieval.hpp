#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dsrim/corpus.hpp"
#include "dsrim/net.hpp"

namespace dsrim {

struct Posting {
    std::size_t doc = 0;  // index into InvertedIndex::doc_ids()
    std::size_t tf = 0;
};

class InvertedIndex {
  public:
    /// Adds a document; raises Error on a duplicate id.
    void add_document(const std::string& id, const TokenList& tokens);

    std::size_t document_count() const noexcept { return m_doc_ids.size(); }
    double average_length() const;
    const std::vector<std::string>& doc_ids() const noexcept { return m_doc_ids; }
    std::size_t doc_length(const std::string& id) const;
    const std::vector<std::size_t>& doc_lengths() const noexcept { return m_doc_lengths; }
    /// Postings of a term, empty for unknown terms.
    const std::vector<Posting>& postings(const std::string& term) const;
    std::size_t term_frequency(const std::string& term, const std::string& doc) const;
    std::size_t vocabulary_size() const noexcept { return m_postings.size(); }

  private:
    std::vector<std::string> m_doc_ids;
    std::map<std::string, std::size_t> m_doc_index;
    std::vector<std::size_t> m_doc_lengths;
    std::size_t m_total_length = 0;
    std::map<std::string, std::vector<Posting>> m_postings;
};

/// Raises ConfigError when the corpus has no documents.
InvertedIndex build_index(const Corpus& corpus);

struct ScoredDoc {
    std::string doc;
    double score = 0.0;

    friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

/// Ranked list for one query: descending score, ties by ascending doc id.
using Ranking = std::vector<ScoredDoc>;
/// Query id -> ranking.
using Run = std::map<std::string, Ranking>;

void sort_ranking(Ranking& ranking);

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

/// idf = ln((N - df + 0.5) / (df + 0.5) + 1)
double bm25_idf(std::size_t document_count, std::size_t df);

/// Okapi BM25 over documents matching at least one query term. Repeated query
/// terms contribute once per occurrence. An all-OOV query gives an empty
/// ranking and a warning.
Ranking bm25_rank(const InvertedIndex& index, const TokenList& query, std::size_t top,
                  const Bm25Params& params = {}, Warnings* warnings = nullptr);

/// Orders candidates by siamese score. Candidates without an input vector are
/// scored 0 with a warning. Output is truncated to `top`.
Ranking rerank(const SiameseParams& model, const std::string& query, const std::vector<std::string>& candidates,
               const VectorStore& vectors, std::size_t top, Warnings* warnings = nullptr);

/// Uniformly random order of the candidates (score = 1 / rank), truncated to `top`.
Ranking random_rerank(const std::vector<std::string>& candidates, std::size_t top, std::uint64_t seed);

std::vector<std::string> doc_ids(const Ranking& ranking);

/// AP with relevant = grade >= 1; unjudged documents count as non-relevant.
/// Returns nullopt when the query has no relevant document.
std::optional<double> average_precision(const Ranking& ranking, const Qrels& qrels, const std::string& query);

struct MapResult {
    double map = 0.0;
    std::map<std::string, double> per_query;
};

/// Mean AP over the run's queries that have at least one relevant judgment.
/// Queries without relevant documents are excluded with a warning.
MapResult mean_average_precision(const Run& run, const Qrels& qrels, Warnings* warnings = nullptr);

/// TREC run rows `query-id Q0 doc-id rank score tag`.
void write_trec_run(std::ostream& out, const Run& run, const std::string& tag);
Run read_trec_run(std::istream& in);

}  // namespace dsrim
