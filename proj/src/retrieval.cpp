#include "dsrim/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dsrim/random.hpp"
#include "dsrim/text.hpp"

namespace dsrim {

void InvertedIndex::add_document(const std::string& id, const TokenList& tokens)
{
    if (!m_doc_index.emplace(id, m_doc_ids.size()).second) {
        throw Error("duplicate document '" + id + "' in index");
    }
    const std::size_t doc = m_doc_ids.size();
    m_doc_ids.push_back(id);
    m_doc_lengths.push_back(tokens.size());
    m_total_length += tokens.size();
    std::map<std::string, std::size_t> tf;
    for (const auto& t : tokens) {
        ++tf[t];
    }
    for (const auto& [term, count] : tf) {
        m_postings[term].push_back({doc, count});
    }
}

double InvertedIndex::average_length() const
{
    return m_doc_ids.empty() ? 0.0 : static_cast<double>(m_total_length) / static_cast<double>(m_doc_ids.size());
}

std::size_t InvertedIndex::doc_length(const std::string& id) const
{
    const auto it = m_doc_index.find(id);
    if (it == m_doc_index.end()) {
        throw LookupError("document '" + id + "' not in index");
    }
    return m_doc_lengths[it->second];
}

const std::vector<Posting>& InvertedIndex::postings(const std::string& term) const
{
    static const std::vector<Posting> kEmpty;
    const auto it = m_postings.find(term);
    return it == m_postings.end() ? kEmpty : it->second;
}

std::size_t InvertedIndex::term_frequency(const std::string& term, const std::string& doc) const
{
    const auto it = m_doc_index.find(doc);
    if (it == m_doc_index.end()) {
        return 0;
    }
    for (const auto& p : postings(term)) {
        if (p.doc == it->second) {
            return p.tf;
        }
    }
    return 0;
}

InvertedIndex build_index(const Corpus& corpus)
{
    if (corpus.documents.empty()) {
        throw ConfigError("cannot index an empty document set");
    }
    InvertedIndex index;
    for (const auto& [id, tokens] : corpus.documents) {
        index.add_document(id, tokens);
    }
    return index;
}

void sort_ranking(Ranking& ranking)
{
    std::sort(ranking.begin(), ranking.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
        return a.score != b.score ? a.score > b.score : a.doc < b.doc;
    });
}

double bm25_idf(std::size_t document_count, std::size_t df)
{
    const auto n = static_cast<double>(document_count);
    const auto f = static_cast<double>(df);
    return std::log((n - f + 0.5) / (f + 0.5) + 1.0);
}

Ranking bm25_rank(const InvertedIndex& index, const TokenList& query, std::size_t top, const Bm25Params& params,
                  Warnings* warnings)
{
    if (top == 0) {
        throw ConfigError("ranking depth must be at least 1");
    }
    std::map<std::string, std::size_t> query_tf;
    for (const auto& t : query) {
        ++query_tf[t];
    }
    const double avg_dl = index.average_length();
    std::vector<double> acc(index.document_count(), 0.0);
    std::vector<bool> touched(index.document_count(), false);
    bool any_known = false;
    for (const auto& [term, qtf] : query_tf) {
        const auto& postings = index.postings(term);
        if (postings.empty()) {
            continue;
        }
        any_known = true;
        const double idf = bm25_idf(index.document_count(), postings.size());
        for (const auto& p : postings) {
            const double tf = static_cast<double>(p.tf);
            const double rel_len = avg_dl > 0.0 ? static_cast<double>(index.doc_lengths()[p.doc]) / avg_dl : 1.0;
            const double norm = params.k1 * (1.0 - params.b + params.b * rel_len);
            acc[p.doc] += static_cast<double>(qtf) * idf * tf * (params.k1 + 1.0) / (tf + norm);
            touched[p.doc] = true;
        }
    }
    Ranking ranking;
    if (!any_known) {
        warn(warnings, "query has no in-vocabulary terms; empty ranking");
        return ranking;
    }
    for (std::size_t d = 0; d < acc.size(); ++d) {
        if (touched[d]) {
            ranking.push_back({index.doc_ids()[d], acc[d]});
        }
    }
    sort_ranking(ranking);
    if (ranking.size() > top) {
        ranking.resize(top);
    }
    return ranking;
}

Ranking rerank(const SiameseParams& model, const std::string& query, const std::vector<std::string>& candidates,
               const VectorStore& vectors, std::size_t top, Warnings* warnings)
{
    if (top == 0) {
        throw ConfigError("ranking depth must be at least 1");
    }
    if (model.layers.empty()) {
        throw ConfigError("re-ranking with an empty model");
    }
    Ranking ranking;
    const InputVector* q = vectors.query(query);
    if (q == nullptr) {
        warn(warnings, "no input vector for query '" + query + "'; all candidates scored 0");
    }
    const Vector yq = q != nullptr ? forward(model, q->values) : Vector(model.output_dim(), 0.0);
    std::set<std::string> seen;
    for (const auto& doc : candidates) {
        if (!seen.insert(doc).second) {
            continue;
        }
        const InputVector* d = vectors.document(doc);
        double s = 0.0;
        if (d == nullptr) {
            warn(warnings, "no input vector for document '" + doc + "'; scored 0");
        } else {
            s = cosine(yq, forward(model, d->values));
        }
        ranking.push_back({doc, s});
    }
    sort_ranking(ranking);
    if (ranking.size() > top) {
        ranking.resize(top);
    }
    return ranking;
}

Ranking random_rerank(const std::vector<std::string>& candidates, std::size_t top, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<std::string> order = candidates;
    rng.shuffle(order);
    Ranking ranking;
    for (std::size_t i = 0; i < order.size() && i < top; ++i) {
        ranking.push_back({order[i], 1.0 / static_cast<double>(i + 1)});
    }
    return ranking;
}

std::vector<std::string> doc_ids(const Ranking& ranking)
{
    std::vector<std::string> ids;
    ids.reserve(ranking.size());
    for (const auto& r : ranking) {
        ids.push_back(r.doc);
    }
    return ids;
}

std::optional<double> average_precision(const Ranking& ranking, const Qrels& qrels, const std::string& query)
{
    const std::size_t total_relevant = qrels.relevant(query).size();
    if (total_relevant == 0) {
        return std::nullopt;
    }
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        if (qrels.is_relevant(query, ranking[i].doc)) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(total_relevant);
}

MapResult mean_average_precision(const Run& run, const Qrels& qrels, Warnings* warnings)
{
    MapResult result;
    double sum = 0.0;
    for (const auto& [query, ranking] : run) {
        const auto ap = average_precision(ranking, qrels, query);
        if (!ap) {
            warn(warnings, "query '" + query + "' has no relevant judgments; excluded from MAP");
            continue;
        }
        result.per_query[query] = *ap;
        sum += *ap;
    }
    result.map = result.per_query.empty() ? 0.0 : sum / static_cast<double>(result.per_query.size());
    return result;
}

void write_trec_run(std::ostream& out, const Run& run, const std::string& tag)
{
    for (const auto& [query, ranking] : run) {
        for (std::size_t i = 0; i < ranking.size(); ++i) {
            out << query << " Q0 " << ranking[i].doc << ' ' << (i + 1) << ' ' << format_double(ranking[i].score)
                << ' ' << tag << '\n';
        }
    }
}

Run read_trec_run(std::istream& in)
{
    Run run;
    std::string line;
    std::size_t line_no = 0;
    while (read_line(in, line, line_no)) {
        if (is_comment_or_blank(line)) {
            continue;
        }
        const auto fields = split_whitespace(line);
        if (fields.size() != 6) {
            throw ParseError(line_no, "run row must be 'query-id Q0 doc-id rank score tag'");
        }
        const auto score = parse_double(fields[4]);
        if (!score) {
            throw ParseError(line_no, "bad score");
        }
        run[std::string(fields[0])].push_back({std::string(fields[2]), *score});
    }
    for (auto& [query, ranking] : run) {
        sort_ranking(ranking);
    }
    return run;
}

}  // namespace dsrim
