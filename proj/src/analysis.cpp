#include "dsrim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "dsrim/random.hpp"
#include "dsrim/text.hpp"

namespace dsrim {

std::map<std::string, double> idf_from_df(const std::map<std::string, std::size_t>& df, std::size_t document_count)
{
    std::map<std::string, double> idf;
    for (const auto& [object, count] : df) {
        if (count >= 1) {
            idf[object] = std::log(static_cast<double>(document_count) / static_cast<double>(count));
        }
    }
    return idf;
}

namespace {

double idf_of(const std::map<std::string, double>& idf, const std::string& object)
{
    const auto it = idf.find(object);
    if (it == idf.end()) {
        throw LookupError("no idf for object '" + object + "'");
    }
    return it->second;
}

template <typename Related>
double directed(const std::vector<std::size_t>& from, const std::vector<std::string>& from_ids,
                const std::vector<std::size_t>& to, const std::map<std::string, double>& idf, Related&& related)
{
    double weighted = 0.0;
    double weight = 0.0;
    double plain = 0.0;
    for (std::size_t i = 0; i < from.size(); ++i) {
        double best = 0.0;
        for (const std::size_t t : to) {
            best = std::max(best, related(from[i], t));
        }
        const double w = idf_of(idf, from_ids[i]);
        weighted += w * best;
        weight += w;
        plain += best;
    }
    return weight > 0.0 ? weighted / weight : plain / static_cast<double>(from.size());
}

template <typename Related>
double corley_impl(const std::vector<std::string>& a, const std::vector<std::string>& b,
                   const KnowledgeGraph& graph, const std::map<std::string, double>& idf, Related&& related)
{
    if (a.empty() || b.empty()) {
        throw Error("Corley similarity is undefined for an empty object list");
    }
    std::vector<std::size_t> ia;
    std::vector<std::size_t> ib;
    for (const auto& o : a) {
        ia.push_back(graph.index_of(o));
    }
    for (const auto& o : b) {
        ib.push_back(graph.index_of(o));
    }
    const double ab = directed(ia, a, ib, idf, related);
    const double ba = directed(ib, b, ia, idf, related);
    return std::clamp(0.5 * (ab + ba), 0.0, 1.0);
}

}  // namespace

double corley_sim(const std::vector<std::string>& a, const std::vector<std::string>& b,
                  const RelatednessCache& relatedness, const std::map<std::string, double>& idf)
{
    const KnowledgeGraph& graph = relatedness.graph();
    const double scale = graph.max_relatedness();
    return corley_impl(a, b, graph, idf, [&](std::size_t x, std::size_t y) {
        return relatedness.leacock(x, y) / scale;
    });
}

double corley_sim(const std::vector<std::string>& a, const std::vector<std::string>& b, const KnowledgeGraph& graph,
                  const std::map<std::string, double>& idf)
{
    const RelatednessCache cache(graph, a);
    return corley_sim(a, b, cache, idf);
}

SeparationReport pivotal_experiment(const std::vector<ReprVariant>& variants, const Corpus& corpus,
                                    const KnowledgeGraph& graph, const std::map<std::string, double>& idf,
                                    std::size_t n_pivots, std::size_t neighborhood, std::uint64_t seed,
                                    Warnings* warnings)
{
    std::vector<std::string> annotated;
    for (const auto& [id, tokens] : corpus.documents) {
        if (!corpus.objects_of(id).empty()) {
            annotated.push_back(id);
        }
    }
    if (neighborhood == 0 || annotated.size() <= 2 * neighborhood + 1) {
        throw ConfigError("pivot experiment needs more than " + std::to_string(2 * neighborhood + 1) +
                          " annotated documents, found " + std::to_string(annotated.size()));
    }
    if (n_pivots > annotated.size()) {
        warn(warnings, "requested " + std::to_string(n_pivots) + " pivots but only " +
                           std::to_string(annotated.size()) + " annotated documents; using all");
    }
    Rng rng(seed);
    std::vector<std::string> pivots = rng.sample(annotated, n_pivots);

    // x^KR of every annotated document, per variant.
    std::vector<std::map<std::string, Vector>> vectors(variants.size());
    for (std::size_t v = 0; v < variants.size(); ++v) {
        for (const auto& id : annotated) {
            vectors[v][id] = variants[v].build(corpus.objects_of(id));
        }
    }

    std::vector<double> top_sum(variants.size(), 0.0);
    std::vector<double> less_sum(variants.size(), 0.0);
    for (const auto& pivot : pivots) {
        const auto& pivot_objects = corpus.objects_of(pivot);
        const RelatednessCache cache(graph, pivot_objects);
        std::vector<std::pair<double, std::string>> ranked;
        for (const auto& id : annotated) {
            if (id != pivot) {
                ranked.emplace_back(corley_sim(pivot_objects, corpus.objects_of(id), cache, idf), id);
            }
        }
        std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
            return x.first != y.first ? x.first > y.first : x.second < y.second;
        });
        for (std::size_t v = 0; v < variants.size(); ++v) {
            const Vector& pv = vectors[v].at(pivot);
            double top = 0.0;
            double less = 0.0;
            for (std::size_t i = 0; i < neighborhood; ++i) {
                top += cosine(pv, vectors[v].at(ranked[i].second));
                less += cosine(pv, vectors[v].at(ranked[ranked.size() - 1 - i].second));
            }
            top_sum[v] += top / static_cast<double>(neighborhood);
            less_sum[v] += less / static_cast<double>(neighborhood);
        }
    }

    SeparationReport report;
    report.pivots = pivots.size();
    report.neighborhood = neighborhood;
    report.seed = seed;
    for (std::size_t v = 0; v < variants.size(); ++v) {
        SeparationRow row;
        row.label = variants[v].label;
        row.k = variants[v].k;
        row.strategy = variants[v].strategy;
        row.top = top_sum[v] / static_cast<double>(pivots.size());
        row.less = less_sum[v] / static_cast<double>(pivots.size());
        row.diff = row.top - row.less;
        report.rows.push_back(std::move(row));
    }
    return report;
}

IoSimilarityReport io_similarity_report(const SiameseParams& model,
                                        const std::vector<std::pair<std::string, std::string>>& relevant_pairs,
                                        const VectorStore& vectors)
{
    IoSimilarityReport report;
    double in_sum = 0.0;
    double out_sum = 0.0;
    for (const auto& [q, d] : relevant_pairs) {
        const InputVector* qv = vectors.query(q);
        const InputVector* dv = vectors.document(d);
        if (qv == nullptr || dv == nullptr) {
            continue;
        }
        in_sum += cosine(qv->values, dv->values);
        out_sum += score(model, qv->values, dv->values);
        ++report.pairs;
    }
    if (report.pairs == 0) {
        return report;
    }
    report.input_cosine = in_sum / static_cast<double>(report.pairs);
    report.output_cosine = out_sum / static_cast<double>(report.pairs);
    if (report.input_cosine != 0.0) {
        report.improvement = (report.output_cosine - report.input_cosine) / std::abs(report.input_cosine);
    }
    return report;
}

namespace {

std::string fixed(double value, int digits = 4)
{
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", digits, value);
    return buffer;
}

void write_aligned(std::ostream& out, const std::vector<std::vector<std::string>>& rows)
{
    std::vector<std::size_t> width;
    for (const auto& row : rows) {
        width.resize(std::max(width.size(), row.size()), 0);
        for (std::size_t c = 0; c < row.size(); ++c) {
            width[c] = std::max(width[c], row[c].size());
        }
    }
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) {
                line += "  ";
            }
            line += row[c];
            if (c + 1 < row.size()) {
                line.append(width[c] - row[c].size(), ' ');
            }
        }
        out << line << '\n';
    }
}

// TSV rows keep full precision; tables round for reading.
std::vector<std::vector<std::string>> separation_rows(const SeparationReport& report, bool exact)
{
    auto num = [exact](double v) { return exact ? format_double(v) : fixed(v); };
    const std::string n = std::to_string(report.neighborhood);
    std::vector<std::vector<std::string>> rows{{"representation", "k", "strategy", "Top_" + n, "Less_" + n, "diff"}};
    for (const auto& r : report.rows) {
        rows.push_back({r.label, std::to_string(r.k), r.strategy, num(r.top), num(r.less), num(r.diff)});
    }
    return rows;
}

std::vector<std::vector<std::string>> difficulty_rows(const DifficultyReport& report, bool exact)
{
    auto num = [exact](double v, int digits) { return exact ? format_double(v) : fixed(v, digits); };
    std::vector<std::vector<std::string>> rows{
        {"difficulty", "queries", "#Words", "#Objects", "baseline_MAP", "model_MAP", "%Change"}};
    for (const auto& c : report.classes) {
        rows.push_back({to_string(c.difficulty), std::to_string(c.queries), num(c.mean_words, 2),
                        num(c.mean_objects, 2), num(c.baseline_map, 4), num(c.model_map, 4),
                        c.percent_change ? num(*c.percent_change, 2) : "n/a"});
    }
    return rows;
}

void write_tsv(std::ostream& out, const std::vector<std::vector<std::string>>& rows)
{
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << (c > 0 ? "\t" : "") << row[c];
        }
        out << '\n';
    }
}

}  // namespace

void write_separation_tsv(std::ostream& out, const SeparationReport& report)
{
    out << "# pivots=" << report.pivots << " neighborhood=" << report.neighborhood << " seed=" << report.seed
        << '\n';
    out << "# LDA comparison row not produced: no LDA implementation in this tool\n";
    write_tsv(out, separation_rows(report, true));
}

void write_separation_table(std::ostream& out, const SeparationReport& report)
{
    out << "Cosine of x^KR between pivots and their most/least similar documents (" << report.pivots
        << " pivots, neighborhood " << report.neighborhood << ", seed " << report.seed << ")\n";
    out << "LDA row omitted: no LDA implementation in this tool.\n\n";
    write_aligned(out, separation_rows(report, false));
}

void write_difficulty_tsv(std::ostream& out, const DifficultyReport& report)
{
    out << "# %Change is per-class MAP-relative: (model MAP - baseline MAP) / baseline MAP * 100\n";
    write_tsv(out, difficulty_rows(report, true));
}

void write_difficulty_table(std::ostream& out, const DifficultyReport& report)
{
    out << "Queries by difficulty (1-D k-means over baseline AP)\n";
    out << "%Change is per-class MAP-relative.\n\n";
    write_aligned(out, difficulty_rows(report, false));
}

void write_io_similarity_tsv(std::ostream& out, const IoSimilarityReport& report)
{
    out << "pairs\tinput_cosine\toutput_cosine\timprovement_pct\n";
    out << report.pairs << '\t' << format_double(report.input_cosine) << '\t' << format_double(report.output_cosine)
        << '\t' << (report.improvement ? format_double(*report.improvement * 100.0) : "n/a") << '\n';
}

}  // namespace dsrim
