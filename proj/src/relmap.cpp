#include "dsrim/relmap.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dsrim/kmeans.hpp"
#include "dsrim/text.hpp"

namespace dsrim {

std::string to_string(RepresentativeStrategy strategy)
{
    switch (strategy) {
    case RepresentativeStrategy::idf_min:
        return "idf_min";
    case RepresentativeStrategy::idf_max:
        return "idf_max";
    case RepresentativeStrategy::centroid:
        return "centroid";
    case RepresentativeStrategy::top_concepts:
        return "top_concepts";
    }
    return "unknown";
}

RepresentativeStrategy parse_strategy(std::string_view name)
{
    if (name == "idf_min") {
        return RepresentativeStrategy::idf_min;
    }
    if (name == "idf_max") {
        return RepresentativeStrategy::idf_max;
    }
    if (name == "centroid") {
        return RepresentativeStrategy::centroid;
    }
    if (name == "top_concepts") {
        return RepresentativeStrategy::top_concepts;
    }
    throw ConfigError("unknown representative strategy '" + std::string(name) +
                      "' (expected idf_min, idf_max, centroid or top_concepts)");
}

std::vector<std::string> Referential::representatives() const
{
    std::vector<std::string> reps;
    reps.reserve(clusters.size());
    for (const auto& c : clusters) {
        reps.push_back(c.representative);
    }
    return reps;
}

namespace {

std::size_t df_of(const std::map<std::string, std::size_t>& df, const std::string& id)
{
    const auto it = df.find(id);
    return it == df.end() ? 0 : it->second;
}

// Members are sorted, so a strict comparison keeps the smallest id on ties.
std::string pick_representative(const TopicalCluster& cluster, RepresentativeStrategy strategy,
                                const std::map<std::string, std::size_t>& df, const EmbeddingTable& vectors)
{
    const auto& members = cluster.members;
    std::size_t best = 0;
    switch (strategy) {
    case RepresentativeStrategy::idf_min:
        for (std::size_t i = 1; i < members.size(); ++i) {
            if (df_of(df, members[i]) > df_of(df, members[best])) {
                best = i;
            }
        }
        break;
    case RepresentativeStrategy::idf_max:
        for (std::size_t i = 1; i < members.size(); ++i) {
            if (df_of(df, members[i]) < df_of(df, members[best])) {
                best = i;
            }
        }
        break;
    case RepresentativeStrategy::centroid: {
        double best_cos = cosine(vectors.at(members[0]), cluster.centroid);
        for (std::size_t i = 1; i < members.size(); ++i) {
            const double c = cosine(vectors.at(members[i]), cluster.centroid);
            if (c > best_cos) {
                best_cos = c;
                best = i;
            }
        }
        break;
    }
    case RepresentativeStrategy::top_concepts:
        throw ConfigError("top_concepts is built by top_concepts_referential");
    }
    return members[best];
}

Vector unit(const Vector& v)
{
    const double n = norm(v);
    Vector u(v.size(), 0.0);
    if (n > 0.0) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            u[i] = v[i] / n;
        }
    }
    return u;
}

}  // namespace

Referential build_referential(const std::vector<std::string>& objects, const EmbeddingTable& object_vectors,
                              std::size_t k, RepresentativeStrategy strategy,
                              const std::map<std::string, std::size_t>& df, std::uint64_t seed,
                              std::size_t max_iter)
{
    if (strategy == RepresentativeStrategy::top_concepts) {
        return top_concepts_referential(objects, df, k, &object_vectors);
    }
    const std::set<std::string> unique(objects.begin(), objects.end());
    const std::vector<std::string> ids(unique.begin(), unique.end());
    std::vector<Vector> points;
    points.reserve(ids.size());
    for (const auto& id : ids) {
        points.push_back(object_vectors.at(id));
    }
    const KMeansResult clustering = kmeans(points, k, max_iter, seed);

    Referential ref;
    ref.strategy = strategy;
    ref.dims = object_vectors.dims();
    ref.clusters.resize(k);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        ref.clusters[clustering.assignments[i]].members.push_back(ids[i]);
    }
    for (std::size_t j = 0; j < k; ++j) {
        auto& cluster = ref.clusters[j];
        cluster.centroid = clustering.centroids[j];
        cluster.representative = pick_representative(cluster, strategy, df, object_vectors);
    }
    return ref;
}

Referential top_concepts_referential(const std::vector<std::string>& objects,
                                     const std::map<std::string, std::size_t>& df, std::size_t k,
                                     const EmbeddingTable* object_vectors)
{
    const std::set<std::string> unique(objects.begin(), objects.end());
    std::vector<std::pair<std::size_t, std::string>> ranked;
    for (const auto& id : unique) {
        const std::size_t f = df_of(df, id);
        if (f > 0) {
            ranked.emplace_back(f, id);
        }
    }
    if (k == 0 || ranked.size() < k) {
        throw ConfigError("top_concepts with k=" + std::to_string(k) + " but only " +
                          std::to_string(ranked.size()) + " objects with df > 0");
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });

    Referential ref;
    ref.strategy = RepresentativeStrategy::top_concepts;
    ref.dims = object_vectors != nullptr ? object_vectors->dims() : 0;
    for (std::size_t j = 0; j < k; ++j) {
        TopicalCluster cluster;
        cluster.members = {ranked[j].second};
        cluster.representative = ranked[j].second;
        if (object_vectors != nullptr) {
            cluster.centroid = object_vectors->at(ranked[j].second);
        }
        ref.clusters.push_back(std::move(cluster));
    }
    return ref;
}

double cluster_importance(const TopicalCluster& cluster, const std::vector<std::string>& text_objects,
                          const EmbeddingTable& object_vectors)
{
    double best = 0.0;
    for (const auto& o : text_objects) {
        const Vector& u = object_vectors.at(o);
        for (const auto& m : cluster.members) {
            best = std::max(best, cosine(u, object_vectors.at(m)));
        }
    }
    return best;
}

double cluster_relatedness(std::string_view representative, const std::vector<std::string>& text_objects,
                           const KnowledgeGraph& graph, double avg_no)
{
    if (!(avg_no > 0.0)) {
        throw ConfigError("avg_no must be positive");
    }
    if (text_objects.empty()) {
        return 0.0;
    }
    const std::size_t rep = graph.index_of(representative);
    const auto dist = graph.distances_from(rep);
    double sum = 0.0;
    for (const auto& o : text_objects) {
        const auto d = dist[graph.index_of(o)];
        const auto length = d == KnowledgeGraph::kUnreachable ? std::nullopt
                                                               : std::optional<std::size_t>(d + 1);
        sum += std::log1p(graph.leacock_from_length(length));
    }
    return sum * (avg_no / static_cast<double>(text_objects.size()));
}

KrVector build_kr_vector(const std::vector<std::string>& text_objects, const Referential& referential,
                         const KnowledgeGraph& graph, const EmbeddingTable& object_vectors, double avg_no,
                         Warnings* warnings)
{
    return KrEncoder(referential, graph, object_vectors, avg_no).encode(text_objects, warnings);
}

KrEncoder::KrEncoder(const Referential& referential, const KnowledgeGraph& graph,
                     const EmbeddingTable& object_vectors, double avg_no)
    : m_graph(&graph), m_vectors(&object_vectors), m_avg_no(avg_no)
{
    if (!(avg_no > 0.0)) {
        throw ConfigError("avg_no must be positive");
    }
    for (const auto& cluster : referential.clusters) {
        std::vector<Vector> members;
        for (const auto& m : cluster.members) {
            members.push_back(unit(object_vectors.at(m)));
        }
        m_members.push_back(std::move(members));
        m_representatives.push_back(graph.index_of(cluster.representative));
    }
    m_cache = std::make_unique<RelatednessCache>(graph, referential.representatives());
}

KrVector KrEncoder::encode(const std::vector<std::string>& text_objects, Warnings* warnings) const
{
    KrVector kr;
    kr.values.assign(m_members.size(), 0.0);
    kr.object_count = text_objects.size();
    if (text_objects.empty()) {
        warn(warnings, "text has no objects; x^KR is the zero vector");
        return kr;
    }

    std::vector<std::size_t> indices;
    indices.reserve(text_objects.size());
    for (const auto& o : text_objects) {
        indices.push_back(m_graph->index_of(o));
    }
    // The max in the importance score ignores multiplicity.
    const std::set<std::string> distinct(text_objects.begin(), text_objects.end());
    std::vector<Vector> text_units;
    for (const auto& o : distinct) {
        text_units.push_back(unit(m_vectors->at(o)));
    }

    const double scale = m_avg_no / static_cast<double>(text_objects.size());
    for (std::size_t j = 0; j < m_members.size(); ++j) {
        double importance = 0.0;
        for (const auto& u : text_units) {
            for (const auto& m : m_members[j]) {
                importance = std::max(importance, std::min(1.0, dot(u, m)));
            }
        }
        if (importance == 0.0) {
            continue;
        }
        double sum = 0.0;
        for (const std::size_t o : indices) {
            sum += std::log1p(m_cache->leacock(m_representatives[j], o));
        }
        kr.values[j] = importance * (sum * scale);
    }
    return kr;
}

namespace {

constexpr std::string_view kReferentialMagic = "# dsrim-referential v1";

std::string expect_field(std::istream& in, std::size_t& line_no, std::string_view key)
{
    std::string line;
    if (!read_line(in, line, line_no)) {
        throw ParseError(line_no, "unexpected end of referential, expected '" + std::string(key) + "'");
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || std::string_view(line).substr(0, tab) != key) {
        throw ParseError(line_no, "expected '" + std::string(key) + "<TAB>value'");
    }
    return line.substr(tab + 1);
}

std::size_t expect_count(std::istream& in, std::size_t& line_no, std::string_view key)
{
    const auto value = parse_int(expect_field(in, line_no, key));
    if (!value || *value < 0) {
        throw ParseError(line_no, "bad count for '" + std::string(key) + "'");
    }
    return static_cast<std::size_t>(*value);
}

}  // namespace

void save_referential(std::ostream& out, const Referential& referential)
{
    out << kReferentialMagic << '\n';
    out << "k\t" << referential.k() << '\n';
    out << "strategy\t" << to_string(referential.strategy) << '\n';
    out << "dims\t" << referential.dims << '\n';
    for (std::size_t j = 0; j < referential.clusters.size(); ++j) {
        const auto& c = referential.clusters[j];
        out << "cluster\t" << j << '\n';
        out << "representative\t" << c.representative << '\n';
        out << "members\t" << c.members.size() << '\n';
        for (const auto& m : c.members) {
            out << m << '\n';
        }
        out << "centroid\t";
        for (std::size_t i = 0; i < c.centroid.size(); ++i) {
            out << (i > 0 ? " " : "") << format_double(c.centroid[i]);
        }
        out << '\n';
    }
}

Referential load_referential(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    if (!read_line(in, line, line_no) || line != kReferentialMagic) {
        throw ParseError(line_no, "not a dsrim referential (expected '" + std::string(kReferentialMagic) + "')");
    }
    Referential ref;
    const std::size_t k = expect_count(in, line_no, "k");
    ref.strategy = parse_strategy(expect_field(in, line_no, "strategy"));
    ref.dims = expect_count(in, line_no, "dims");
    for (std::size_t j = 0; j < k; ++j) {
        if (expect_count(in, line_no, "cluster") != j) {
            throw ParseError(line_no, "clusters out of order");
        }
        TopicalCluster cluster;
        cluster.representative = expect_field(in, line_no, "representative");
        const std::size_t members = expect_count(in, line_no, "members");
        for (std::size_t m = 0; m < members; ++m) {
            if (!read_line(in, line, line_no)) {
                throw ParseError(line_no, "truncated member list");
            }
            cluster.members.push_back(line);
        }
        const std::string centroid = expect_field(in, line_no, "centroid");
        for (auto field : split_whitespace(centroid)) {
            const auto x = parse_double(field);
            if (!x) {
                throw ParseError(line_no, "bad centroid component");
            }
            cluster.centroid.push_back(*x);
        }
        if (cluster.centroid.size() != ref.dims) {
            throw ParseError(line_no, "centroid length differs from dims");
        }
        if (!std::binary_search(cluster.members.begin(), cluster.members.end(), cluster.representative)) {
            throw ParseError(line_no, "representative is not a member of its cluster");
        }
        ref.clusters.push_back(std::move(cluster));
    }
    return ref;
}

}  // namespace dsrim
