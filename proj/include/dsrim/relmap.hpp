#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dsrim/embeddings.hpp"
#include "dsrim/kgraph.hpp"

namespace dsrim {

/// How the representative object of a cluster is chosen. `top_concepts` marks
/// the frequency baseline where every cluster is a single frequent object.
enum class RepresentativeStrategy { idf_min, idf_max, centroid, top_concepts };

std::string to_string(RepresentativeStrategy strategy);
RepresentativeStrategy parse_strategy(std::string_view name);

struct TopicalCluster {
    /// Sorted ascending.
    std::vector<std::string> members;
    Vector centroid;
    std::string representative;
};

struct Referential {
    RepresentativeStrategy strategy = RepresentativeStrategy::centroid;
    std::size_t dims = 0;
    std::vector<TopicalCluster> clusters;

    std::size_t k() const noexcept { return clusters.size(); }
    std::vector<std::string> representatives() const;
};

struct KrVector {
    Vector values;
    std::size_t object_count = 0;
};

/// Clusters the object vectors with k-means and picks one representative per
/// cluster: idf_min takes the most frequent member, idf_max the rarest, centroid
/// the member with the highest cosine to the centroid. Ties go to the smallest id.
Referential build_referential(const std::vector<std::string>& objects, const EmbeddingTable& object_vectors,
                              std::size_t k, RepresentativeStrategy strategy,
                              const std::map<std::string, std::size_t>& df, std::uint64_t seed,
                              std::size_t max_iter = 100);

/// Frequency baseline: the k most frequent objects (df desc, id asc), each a
/// singleton cluster and its own representative. When `object_vectors` is given
/// each centroid is the object's vector.
Referential top_concepts_referential(const std::vector<std::string>& objects,
                                     const std::map<std::string, std::size_t>& df, std::size_t k,
                                     const EmbeddingTable* object_vectors = nullptr);

/// w_j^T: max over (text object, member) pairs of max(0, cosine).
double cluster_importance(const TopicalCluster& cluster, const std::vector<std::string>& text_objects,
                          const EmbeddingTable& object_vectors);

/// S_relat: sum of ln(1 + leacock(rep, o)) over the text objects (multiset), times avg_no / |O(T)|.
double cluster_relatedness(std::string_view representative, const std::vector<std::string>& text_objects,
                           const KnowledgeGraph& graph, double avg_no);

/// x^KR with values[j] = importance_j * relatedness_j. An empty object list
/// gives the zero vector and a warning.
KrVector build_kr_vector(const std::vector<std::string>& text_objects, const Referential& referential,
                         const KnowledgeGraph& graph, const EmbeddingTable& object_vectors, double avg_no,
                         Warnings* warnings = nullptr);

/// Reusable x^KR builder. Precomputes unit member vectors and BFS rows from
/// every representative so that encoding many texts stays cheap. Encoding is
/// const and safe to call concurrently.
class KrEncoder {
  public:
    KrEncoder(const Referential& referential, const KnowledgeGraph& graph, const EmbeddingTable& object_vectors,
              double avg_no);

    KrVector encode(const std::vector<std::string>& text_objects, Warnings* warnings = nullptr) const;
    std::size_t k() const noexcept { return m_members.size(); }

  private:
    const KnowledgeGraph* m_graph;
    const EmbeddingTable* m_vectors;
    double m_avg_no;
    std::vector<std::vector<Vector>> m_members;  // unit vectors per cluster
    std::vector<std::size_t> m_representatives;  // graph indices
    std::unique_ptr<RelatednessCache> m_cache;
};

/// Versioned flat text format; floats use shortest round-trip notation.
void save_referential(std::ostream& out, const Referential& referential);
Referential load_referential(std::istream& in);

}  // namespace dsrim
