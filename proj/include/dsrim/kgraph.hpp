#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dsrim {

struct ObjectNode {
    std::string id;
    std::string label;
    /// Number of collection documents annotated with this object.
    std::size_t df = 0;
};

struct Edge {
    std::string child;
    std::string parent;
    std::string relation;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Knowledge resource as an immutable graph. Objects are indexed in ascending id
/// order; edges are undirected for path computation.
class KnowledgeGraph {
  public:
    static constexpr std::uint32_t kUnreachable = UINT32_MAX;

    KnowledgeGraph();

    /// Validates and indexes the parts. Duplicate edges collapse; an edge whose
    /// endpoint is unknown, a self-loop, or a cycle along child->parent links
    /// raises LoadError.
    static KnowledgeGraph from_parts(std::vector<ObjectNode> nodes, std::vector<Edge> edges);

    std::size_t size() const noexcept { return m_objects.size(); }
    bool contains(std::string_view id) const;
    const std::vector<ObjectNode>& objects() const noexcept { return m_objects; }
    const std::vector<Edge>& edges() const noexcept { return m_edges; }
    const ObjectNode& object(std::string_view id) const;
    const ObjectNode& object_at(std::size_t index) const { return m_objects.at(index); }

    /// Number of nodes on the longest root-to-node chain of child->parent links (>= 1).
    std::size_t max_depth() const noexcept { return m_max_depth; }

    std::optional<std::size_t> find(std::string_view id) const;
    /// Like find() but raises LookupError naming the id.
    std::size_t index_of(std::string_view id) const;
    const std::vector<std::uint32_t>& neighbors(std::size_t index) const { return m_adjacency.at(index); }

    /// BFS edge counts from `index` to every node; kUnreachable when disconnected.
    std::vector<std::uint32_t> distances_from(std::size_t index) const;

    /// Number of nodes on the shortest undirected path; absent when disconnected.
    std::optional<std::size_t> path_length(std::string_view a, std::string_view b) const;

    /// Leacock-Chodorow relatedness -ln(len / (2 * max_depth)), floored at 0.
    double leacock_sim(std::string_view a, std::string_view b) const;

    /// The Leacock value for a given node-count path length (absent means disconnected).
    double leacock_from_length(std::optional<std::size_t> length) const;

    /// ln(2 * max_depth), the self-relatedness of every object.
    double max_relatedness() const;

    /// Fills ObjectNode::df; objects absent from the map get 0. Unknown ids are ignored.
    void set_document_frequencies(const std::map<std::string, std::size_t>& df);

  private:
    std::vector<ObjectNode> m_objects;
    std::vector<Edge> m_edges;
    std::unordered_map<std::string, std::size_t> m_index;
    std::vector<std::vector<std::uint32_t>> m_adjacency;
    std::size_t m_max_depth = 1;
};

/// Reads `id<TAB>label` node rows and `child<TAB>parent<TAB>relation` edge rows.
/// Only edges whose relation equals `relation_filter` are kept ("*" keeps all).
/// Lines beginning with '#' and blank lines are skipped.
KnowledgeGraph load_graph(std::istream& nodes, std::istream& edges, std::string_view relation_filter);

/// Single-file cache of a loaded graph (nodes with df, then kept edges).
void save_graph(std::ostream& out, const KnowledgeGraph& graph);
KnowledgeGraph load_graph_cache(std::istream& in);

/// Precomputed BFS rows from a set of source objects. Lookups are keyed
/// symmetrically: a pair is served from whichever endpoint has a row, otherwise
/// computed on the fly without caching. Immutable once constructed.
class RelatednessCache {
  public:
    RelatednessCache(const KnowledgeGraph& graph, const std::vector<std::string>& sources);

    std::optional<std::size_t> path_length(std::size_t a, std::size_t b) const;
    double leacock(std::size_t a, std::size_t b) const;
    double leacock(std::string_view a, std::string_view b) const;

    const KnowledgeGraph& graph() const noexcept { return *m_graph; }

  private:
    const KnowledgeGraph* m_graph;
    std::unordered_map<std::size_t, std::vector<std::uint32_t>> m_rows;
};

}  // namespace dsrim
