#include "dsrim/kgraph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "dsrim/error.hpp"
#include "dsrim/text.hpp"

namespace dsrim {

KnowledgeGraph::KnowledgeGraph() = default;

KnowledgeGraph KnowledgeGraph::from_parts(std::vector<ObjectNode> nodes, std::vector<Edge> edges)
{
    KnowledgeGraph g;
    std::sort(nodes.begin(), nodes.end(),
              [](const ObjectNode& a, const ObjectNode& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id.empty()) {
            throw LoadError("object with empty id");
        }
        if (i > 0 && nodes[i].id == nodes[i - 1].id) {
            throw LoadError("duplicate object id '" + nodes[i].id + "'");
        }
        g.m_index.emplace(nodes[i].id, i);
    }
    g.m_objects = std::move(nodes);

    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    const std::size_t n = g.m_objects.size();
    std::vector<std::set<std::uint32_t>> adjacency(n);
    std::vector<std::vector<std::uint32_t>> parents(n);
    std::set<std::pair<std::uint32_t, std::uint32_t>> links;
    for (const Edge& e : edges) {
        const auto child = g.find(e.child);
        const auto parent = g.find(e.parent);
        if (!child) {
            throw LoadError("edge references unknown object '" + e.child + "'");
        }
        if (!parent) {
            throw LoadError("edge references unknown object '" + e.parent + "'");
        }
        if (*child == *parent) {
            throw LoadError("self-loop on object '" + e.child + "'");
        }
        const auto c = static_cast<std::uint32_t>(*child);
        const auto p = static_cast<std::uint32_t>(*parent);
        adjacency[c].insert(p);
        adjacency[p].insert(c);
        if (links.emplace(c, p).second) {
            parents[c].push_back(p);
        }
    }
    g.m_edges = std::move(edges);
    g.m_adjacency.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        g.m_adjacency[i].assign(adjacency[i].begin(), adjacency[i].end());
    }

    // Longest chain via Kahn's algorithm on parent -> child order.
    std::vector<std::vector<std::uint32_t>> children(n);
    std::vector<std::size_t> pending(n, 0);
    for (std::size_t c = 0; c < n; ++c) {
        pending[c] = parents[c].size();
        for (auto p : parents[c]) {
            children[p].push_back(static_cast<std::uint32_t>(c));
        }
    }
    std::vector<std::size_t> depth(n, 1);
    std::deque<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (pending[i] == 0) {
            ready.push_back(i);
        }
    }
    std::size_t visited = 0;
    std::size_t max_depth = 1;
    while (!ready.empty()) {
        const std::size_t u = ready.front();
        ready.pop_front();
        ++visited;
        max_depth = std::max(max_depth, depth[u]);
        for (auto c : children[u]) {
            depth[c] = std::max(depth[c], depth[u] + 1);
            if (--pending[c] == 0) {
                ready.push_back(c);
            }
        }
    }
    if (visited != n) {
        throw LoadError("cycle along child->parent links");
    }
    g.m_max_depth = max_depth;
    return g;
}

bool KnowledgeGraph::contains(std::string_view id) const
{
    return find(id).has_value();
}

std::optional<std::size_t> KnowledgeGraph::find(std::string_view id) const
{
    const auto it = m_index.find(std::string(id));
    if (it == m_index.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::size_t KnowledgeGraph::index_of(std::string_view id) const
{
    const auto index = find(id);
    if (!index) {
        throw LookupError("unknown object '" + std::string(id) + "'");
    }
    return *index;
}

const ObjectNode& KnowledgeGraph::object(std::string_view id) const
{
    return m_objects[index_of(id)];
}

std::vector<std::uint32_t> KnowledgeGraph::distances_from(std::size_t index) const
{
    std::vector<std::uint32_t> dist(m_objects.size(), kUnreachable);
    std::vector<std::uint32_t> frontier{static_cast<std::uint32_t>(index)};
    dist.at(index) = 0;
    std::size_t head = 0;
    while (head < frontier.size()) {
        const auto u = frontier[head++];
        for (auto v : m_adjacency[u]) {
            if (dist[v] == kUnreachable) {
                dist[v] = dist[u] + 1;
                frontier.push_back(v);
            }
        }
    }
    return dist;
}

std::optional<std::size_t> KnowledgeGraph::path_length(std::string_view a, std::string_view b) const
{
    const std::size_t ia = index_of(a);
    const std::size_t ib = index_of(b);
    const auto d = distances_from(ia)[ib];
    if (d == kUnreachable) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(d) + 1;
}

double KnowledgeGraph::leacock_from_length(std::optional<std::size_t> length) const
{
    if (!length) {
        return 0.0;
    }
    const double scale = 2.0 * static_cast<double>(m_max_depth);
    const auto len = static_cast<double>(*length);
    if (len > scale) {
        return 0.0;
    }
    return -std::log(len / scale);
}

double KnowledgeGraph::leacock_sim(std::string_view a, std::string_view b) const
{
    return leacock_from_length(path_length(a, b));
}

double KnowledgeGraph::max_relatedness() const
{
    // Same expression as a one-node path so that self-relatedness compares equal.
    return leacock_from_length(1);
}

void KnowledgeGraph::set_document_frequencies(const std::map<std::string, std::size_t>& df)
{
    for (auto& node : m_objects) {
        const auto it = df.find(node.id);
        node.df = it == df.end() ? 0 : it->second;
    }
}

KnowledgeGraph load_graph(std::istream& nodes_in, std::istream& edges_in, std::string_view relation_filter)
{
    std::vector<ObjectNode> nodes;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (read_line(nodes_in, line, line_no)) {
        if (is_comment_or_blank(line)) {
            continue;
        }
        const auto fields = split(line, '\t');
        if (fields.size() != 2) {
            throw ParseError(line_no, "node row must be 'id<TAB>label'");
        }
        std::string id(trim(fields[0]));
        if (id.empty()) {
            throw ParseError(line_no, "empty object id");
        }
        if (!seen.insert(id).second) {
            throw ParseError(line_no, "duplicate object id '" + id + "'");
        }
        nodes.push_back({std::move(id), std::string(fields[1]), 0});
    }

    std::vector<Edge> edges;
    line_no = 0;
    while (read_line(edges_in, line, line_no)) {
        if (is_comment_or_blank(line)) {
            continue;
        }
        const auto fields = split(line, '\t');
        if (fields.size() != 3) {
            throw ParseError(line_no, "edge row must be 'child<TAB>parent<TAB>relation'");
        }
        Edge e{std::string(trim(fields[0])), std::string(trim(fields[1])), std::string(trim(fields[2]))};
        if (relation_filter != "*" && e.relation != relation_filter) {
            continue;
        }
        for (const std::string* id : {&e.child, &e.parent}) {
            if (seen.count(*id) == 0) {
                throw LoadError("line " + std::to_string(line_no) + ": edge references unknown object '" +
                                *id + "'");
            }
        }
        edges.push_back(std::move(e));
    }
    return KnowledgeGraph::from_parts(std::move(nodes), std::move(edges));
}

void save_graph(std::ostream& out, const KnowledgeGraph& graph)
{
    out << "# dsrim-graph v1\n";
    for (const auto& node : graph.objects()) {
        out << "node\t" << node.id << '\t' << node.df << '\t' << node.label << '\n';
    }
    for (const auto& e : graph.edges()) {
        out << "edge\t" << e.child << '\t' << e.parent << '\t' << e.relation << '\n';
    }
}

KnowledgeGraph load_graph_cache(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    if (!read_line(in, line, line_no) || line != "# dsrim-graph v1") {
        throw ParseError(line_no, "not a dsrim graph cache (expected '# dsrim-graph v1')");
    }
    std::vector<ObjectNode> nodes;
    std::vector<Edge> edges;
    while (read_line(in, line, line_no)) {
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line, '\t');
        if (fields[0] == "node" && fields.size() == 4) {
            const auto df = parse_int(fields[2]);
            if (!df || *df < 0) {
                throw ParseError(line_no, "bad df value");
            }
            nodes.push_back({std::string(fields[1]), std::string(fields[3]), static_cast<std::size_t>(*df)});
        } else if (fields[0] == "edge" && fields.size() == 4) {
            edges.push_back({std::string(fields[1]), std::string(fields[2]), std::string(fields[3])});
        } else {
            throw ParseError(line_no, "unrecognized graph cache row");
        }
    }
    return KnowledgeGraph::from_parts(std::move(nodes), std::move(edges));
}

RelatednessCache::RelatednessCache(const KnowledgeGraph& graph, const std::vector<std::string>& sources)
    : m_graph(&graph)
{
    for (const auto& id : sources) {
        const std::size_t index = graph.index_of(id);
        if (m_rows.find(index) == m_rows.end()) {
            m_rows.emplace(index, graph.distances_from(index));
        }
    }
}

std::optional<std::size_t> RelatednessCache::path_length(std::size_t a, std::size_t b) const
{
    std::uint32_t d = KnowledgeGraph::kUnreachable;
    if (auto it = m_rows.find(a); it != m_rows.end()) {
        d = it->second[b];
    } else if (auto jt = m_rows.find(b); jt != m_rows.end()) {
        d = jt->second[a];
    } else {
        d = m_graph->distances_from(a)[b];
    }
    if (d == KnowledgeGraph::kUnreachable) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(d) + 1;
}

double RelatednessCache::leacock(std::size_t a, std::size_t b) const
{
    return m_graph->leacock_from_length(path_length(a, b));
}

double RelatednessCache::leacock(std::string_view a, std::string_view b) const
{
    return leacock(m_graph->index_of(a), m_graph->index_of(b));
}

}  // namespace dsrim
