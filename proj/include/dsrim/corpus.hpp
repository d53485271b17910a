#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dsrim/embeddings.hpp"
#include "dsrim/error.hpp"
#include "dsrim/kgraph.hpp"
#include "dsrim/relmap.hpp"

namespace dsrim {

using TokenList = std::vector<std::string>;

struct Corpus {
    std::map<std::string, TokenList> documents;
    std::map<std::string, TokenList> queries;
    /// O(T) per text id, as a multiset in file order.
    std::map<std::string, std::vector<std::string>> annotations;
    /// Mean number of annotated objects per document (0 allowed).
    double avg_no = 0.0;

    /// O(T) of a text, empty when it has no annotations.
    const std::vector<std::string>& objects_of(const std::string& text_id) const;
};

/// Reads line-delimited JSON records `{"id": ..., "text": ...}` for documents and queries.
/// Duplicate ids and malformed records raise errors; empty texts are kept with a warning.
Corpus load_corpus(std::istream& documents, std::istream& queries, Warnings* warnings = nullptr);

struct AnnotationOptions {
    /// Count query annotations toward df and avg_no.
    bool include_queries = false;
    /// When set, objects absent from this graph are dropped with a warning.
    const KnowledgeGraph* graph = nullptr;
};

/// Reads `text-id<TAB>object-id` rows into corpus.annotations, sets corpus.avg_no,
/// and returns df (distinct documents per object). Unknown text ids are skipped
/// with a warning.
std::map<std::string, std::size_t> load_annotations(std::istream& in, Corpus& corpus,
                                                    const AnnotationOptions& options = {},
                                                    Warnings* warnings = nullptr);

/// Recomputes avg_no and df from corpus.annotations.
std::map<std::string, std::size_t> annotation_statistics(Corpus& corpus, bool include_queries = false);

class Qrels {
  public:
    /// Raises Error on a duplicate pair or a grade outside {0, 1, 2}.
    void add(const std::string& query, const std::string& doc, int grade);
    std::optional<int> grade(const std::string& query, const std::string& doc) const;
    bool is_relevant(const std::string& query, const std::string& doc) const;

    /// Judged (doc, grade) pairs of a query, ascending doc id.
    const std::map<std::string, int>& judgments(const std::string& query) const;
    std::vector<std::string> relevant(const std::string& query) const;
    std::vector<std::string> queries() const;
    std::size_t size() const noexcept;

    const std::map<std::string, std::map<std::string, int>>& all() const noexcept { return m_judgments; }

  private:
    std::map<std::string, std::map<std::string, int>> m_judgments;
};

/// TREC qrels rows `query-id 0 doc-id grade`.
Qrels load_qrels(std::istream& in);
void save_qrels(std::ostream& out, const Qrels& qrels);

struct TrainingInstance {
    std::string query;
    std::string positive;
    std::vector<std::string> negatives;
    /// Parallel to `negatives`: true when drawn from unjudged BM25 candidates.
    std::vector<bool> unjudged;
};

/// One instance per relevant (grade >= 1) pair. Negatives are drawn uniformly
/// without replacement from the query's grade-0 documents, topped up from
/// candidates absent from the qrels. A pair for which fewer than n negatives
/// exist is skipped with a warning.
std::vector<TrainingInstance> sample_training_instances(const Qrels& qrels,
                                                        const std::map<std::string, std::vector<std::string>>& candidates,
                                                        std::size_t n, std::uint64_t seed,
                                                        Warnings* warnings = nullptr,
                                                        const std::vector<std::string>* query_subset = nullptr);

/// Shuffled partition into `folds` sets whose sizes differ by at most one.
std::vector<std::vector<std::string>> split_folds(std::vector<std::string> query_ids, std::size_t folds,
                                                  std::uint64_t seed);

/// x_input = (x^t, x^KR), no normalization.
struct InputVector {
    Vector values;
    std::size_t text_dims = 0;

    std::size_t size() const noexcept { return values.size(); }
    std::span<const double> text_part() const { return {values.data(), text_dims}; }
    std::span<const double> kr_part() const { return {values.data() + text_dims, values.size() - text_dims}; }
};

InputVector build_input_vector(std::span<const double> x_t, const KrVector& x_kr);

/// Which parts of the input vector a model sees.
enum class InputRepresentation { kr_p2v, kr, p2v };

std::string to_string(InputRepresentation representation);
InputRepresentation parse_representation(std::string_view name);

/// Input vectors for queries and documents of one experiment.
class VectorStore {
  public:
    void set_query(const std::string& id, InputVector v);
    void set_document(const std::string& id, InputVector v);
    const InputVector* query(const std::string& id) const;
    const InputVector* document(const std::string& id) const;
    /// LookupError naming the id.
    const InputVector& require_query(const std::string& id) const;
    const InputVector& require_document(const std::string& id) const;
    std::size_t dims() const noexcept { return m_dims; }

    const std::map<std::string, InputVector>& queries() const noexcept { return m_queries; }
    const std::map<std::string, InputVector>& documents() const noexcept { return m_documents; }

  private:
    void check(const InputVector& v);

    std::size_t m_dims = 0;
    std::map<std::string, InputVector> m_queries;
    std::map<std::string, InputVector> m_documents;
};

/// Versioned TSV: header, then `q|d<TAB>id<TAB>text_dims<TAB>floats`.
void save_vector_store(std::ostream& out, const VectorStore& store);
VectorStore load_vector_store(std::istream& in);

}  // namespace dsrim
