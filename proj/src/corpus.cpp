#include "dsrim/corpus.hpp"

#include <algorithm>
#include <set>

#include "dsrim/random.hpp"
#include "dsrim/text.hpp"
#include "json.hpp"

namespace dsrim {

const std::vector<std::string>& Corpus::objects_of(const std::string& text_id) const
{
    static const std::vector<std::string> kEmpty;
    const auto it = annotations.find(text_id);
    return it == annotations.end() ? kEmpty : it->second;
}

namespace {

void read_records(std::istream& in, std::map<std::string, TokenList>& out, const char* kind, Warnings* warnings)
{
    std::string line;
    std::size_t line_no = 0;
    while (read_line(in, line, line_no)) {
        if (trim(line).empty()) {
            continue;
        }
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(line_no, std::string("malformed ") + kind + " record: " + e.what());
        }
        if (!record.is_object() || !record.contains("id") || !record["id"].is_string() ||
            !record.contains("text") || !record["text"].is_string()) {
            throw ParseError(line_no, std::string(kind) + " record needs string fields 'id' and 'text'");
        }
        const auto id = record["id"].get<std::string>();
        if (id.empty()) {
            throw ParseError(line_no, std::string("empty ") + kind + " id");
        }
        auto tokens = tokenize(record["text"].get<std::string>());
        if (tokens.empty()) {
            warn(warnings, std::string(kind) + " '" + id + "' has empty text");
        }
        if (!out.emplace(id, std::move(tokens)).second) {
            throw ParseError(line_no, std::string("duplicate ") + kind + " id '" + id + "'");
        }
    }
}

}  // namespace

Corpus load_corpus(std::istream& documents, std::istream& queries, Warnings* warnings)
{
    Corpus corpus;
    read_records(documents, corpus.documents, "document", warnings);
    read_records(queries, corpus.queries, "query", warnings);
    return corpus;
}

std::map<std::string, std::size_t> annotation_statistics(Corpus& corpus, bool include_queries)
{
    std::map<std::string, std::size_t> df;
    std::size_t texts = 0;
    std::size_t objects = 0;
    auto count = [&](const std::map<std::string, TokenList>& texts_of_kind) {
        for (const auto& [id, tokens] : texts_of_kind) {
            ++texts;
            const auto& objs = corpus.objects_of(id);
            objects += objs.size();
            for (const auto& o : std::set<std::string>(objs.begin(), objs.end())) {
                ++df[o];
            }
        }
    };
    count(corpus.documents);
    if (include_queries) {
        count(corpus.queries);
    }
    corpus.avg_no = texts == 0 ? 0.0 : static_cast<double>(objects) / static_cast<double>(texts);
    return df;
}

std::map<std::string, std::size_t> load_annotations(std::istream& in, Corpus& corpus,
                                                    const AnnotationOptions& options, Warnings* warnings)
{
    corpus.annotations.clear();
    std::set<std::string> unknown_texts;
    std::set<std::string> unknown_objects;
    std::string line;
    std::size_t line_no = 0;
    while (read_line(in, line, line_no)) {
        if (is_comment_or_blank(line)) {
            continue;
        }
        const auto fields = split(line, '\t');
        if (fields.size() != 2 || trim(fields[0]).empty() || trim(fields[1]).empty()) {
            throw ParseError(line_no, "annotation row must be 'text-id<TAB>object-id'");
        }
        std::string text(trim(fields[0]));
        std::string object(trim(fields[1]));
        if (corpus.documents.count(text) == 0 && corpus.queries.count(text) == 0) {
            if (unknown_texts.insert(text).second) {
                warn(warnings, "annotation for unknown text '" + text + "' skipped");
            }
            continue;
        }
        if (options.graph != nullptr && !options.graph->contains(object)) {
            if (unknown_objects.insert(object).second) {
                warn(warnings, "annotation object '" + object + "' not in the graph; skipped");
            }
            continue;
        }
        corpus.annotations[text].push_back(std::move(object));
    }
    return annotation_statistics(corpus, options.include_queries);
}

void Qrels::add(const std::string& query, const std::string& doc, int grade)
{
    if (grade < 0 || grade > 2) {
        throw Error("relevance grade " + std::to_string(grade) + " outside {0,1,2}");
    }
    if (!m_judgments[query].emplace(doc, grade).second) {
        throw Error("duplicate judgment for (" + query + ", " + doc + ")");
    }
}

std::optional<int> Qrels::grade(const std::string& query, const std::string& doc) const
{
    const auto q = m_judgments.find(query);
    if (q == m_judgments.end()) {
        return std::nullopt;
    }
    const auto d = q->second.find(doc);
    if (d == q->second.end()) {
        return std::nullopt;
    }
    return d->second;
}

bool Qrels::is_relevant(const std::string& query, const std::string& doc) const
{
    const auto g = grade(query, doc);
    return g && *g >= 1;
}

const std::map<std::string, int>& Qrels::judgments(const std::string& query) const
{
    static const std::map<std::string, int> kEmpty;
    const auto it = m_judgments.find(query);
    return it == m_judgments.end() ? kEmpty : it->second;
}

std::vector<std::string> Qrels::relevant(const std::string& query) const
{
    std::vector<std::string> docs;
    for (const auto& [doc, grade] : judgments(query)) {
        if (grade >= 1) {
            docs.push_back(doc);
        }
    }
    return docs;
}

std::vector<std::string> Qrels::queries() const
{
    std::vector<std::string> ids;
    for (const auto& [q, _] : m_judgments) {
        ids.push_back(q);
    }
    return ids;
}

std::size_t Qrels::size() const noexcept
{
    std::size_t n = 0;
    for (const auto& [q, docs] : m_judgments) {
        n += docs.size();
    }
    return n;
}

Qrels load_qrels(std::istream& in)
{
    Qrels qrels;
    std::string line;
    std::size_t line_no = 0;
    while (read_line(in, line, line_no)) {
        if (is_comment_or_blank(line)) {
            continue;
        }
        const auto fields = split_whitespace(line);
        if (fields.size() != 4) {
            throw ParseError(line_no, "qrels row must be 'query-id 0 doc-id grade'");
        }
        const auto grade = parse_int(fields[3]);
        if (!grade) {
            throw ParseError(line_no, "bad relevance grade '" + std::string(fields[3]) + "'");
        }
        try {
            qrels.add(std::string(fields[0]), std::string(fields[2]), static_cast<int>(*grade));
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return qrels;
}

void save_qrels(std::ostream& out, const Qrels& qrels)
{
    for (const auto& [query, docs] : qrels.all()) {
        for (const auto& [doc, grade] : docs) {
            out << query << " 0 " << doc << ' ' << grade << '\n';
        }
    }
}

std::vector<TrainingInstance> sample_training_instances(
    const Qrels& qrels, const std::map<std::string, std::vector<std::string>>& candidates, std::size_t n,
    std::uint64_t seed, Warnings* warnings, const std::vector<std::string>* query_subset)
{
    if (n == 0) {
        throw ConfigError("number of negatives must be at least 1");
    }
    std::vector<std::string> queries = query_subset != nullptr ? *query_subset : qrels.queries();
    std::sort(queries.begin(), queries.end());
    queries.erase(std::unique(queries.begin(), queries.end()), queries.end());

    Rng rng(seed);
    std::vector<TrainingInstance> instances;
    for (const auto& q : queries) {
        const auto& judged = qrels.judgments(q);
        std::vector<std::string> judged_negatives;
        std::vector<std::string> relevant;
        for (const auto& [doc, grade] : judged) {
            (grade >= 1 ? relevant : judged_negatives).push_back(doc);
        }
        if (relevant.empty()) {
            warn(warnings, "query '" + q + "' has no relevant documents; no training instances");
            continue;
        }
        std::vector<std::string> unjudged_pool;
        if (const auto it = candidates.find(q); it != candidates.end()) {
            std::set<std::string> seen;
            for (const auto& doc : it->second) {
                if (judged.count(doc) == 0 && seen.insert(doc).second) {
                    unjudged_pool.push_back(doc);
                }
            }
        }
        if (judged_negatives.size() + unjudged_pool.size() < n) {
            warn(warnings, "query '" + q + "' has only " +
                               std::to_string(judged_negatives.size() + unjudged_pool.size()) +
                               " possible negatives (need " + std::to_string(n) + "); instances skipped");
            continue;
        }
        for (const auto& positive : relevant) {
            TrainingInstance inst;
            inst.query = q;
            inst.positive = positive;
            inst.negatives = rng.sample(judged_negatives, n);
            inst.unjudged.assign(inst.negatives.size(), false);
            if (inst.negatives.size() < n) {
                for (auto& doc : rng.sample(unjudged_pool, n - inst.negatives.size())) {
                    inst.negatives.push_back(std::move(doc));
                    inst.unjudged.push_back(true);
                }
            }
            instances.push_back(std::move(inst));
        }
    }
    return instances;
}

std::vector<std::vector<std::string>> split_folds(std::vector<std::string> query_ids, std::size_t folds,
                                                  std::uint64_t seed)
{
    if (folds < 2) {
        throw ConfigError("cross-validation needs at least 2 folds");
    }
    std::sort(query_ids.begin(), query_ids.end());
    query_ids.erase(std::unique(query_ids.begin(), query_ids.end()), query_ids.end());
    if (query_ids.size() < folds) {
        throw ConfigError(std::to_string(folds) + " folds requested for " + std::to_string(query_ids.size()) +
                          " queries");
    }
    Rng rng(seed);
    rng.shuffle(query_ids);
    std::vector<std::vector<std::string>> out(folds);
    const std::size_t base = query_ids.size() / folds;
    const std::size_t extra = query_ids.size() % folds;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < folds; ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        out[f].assign(query_ids.begin() + static_cast<std::ptrdiff_t>(pos),
                      query_ids.begin() + static_cast<std::ptrdiff_t>(pos + size));
        std::sort(out[f].begin(), out[f].end());
        pos += size;
    }
    return out;
}

InputVector build_input_vector(std::span<const double> x_t, const KrVector& x_kr)
{
    InputVector v;
    v.text_dims = x_t.size();
    v.values.reserve(x_t.size() + x_kr.values.size());
    v.values.insert(v.values.end(), x_t.begin(), x_t.end());
    v.values.insert(v.values.end(), x_kr.values.begin(), x_kr.values.end());
    return v;
}

std::string to_string(InputRepresentation representation)
{
    switch (representation) {
    case InputRepresentation::kr_p2v:
        return "kr+p2v";
    case InputRepresentation::kr:
        return "kr";
    case InputRepresentation::p2v:
        return "p2v";
    }
    return "unknown";
}

InputRepresentation parse_representation(std::string_view name)
{
    if (name == "kr+p2v") {
        return InputRepresentation::kr_p2v;
    }
    if (name == "kr") {
        return InputRepresentation::kr;
    }
    if (name == "p2v") {
        return InputRepresentation::p2v;
    }
    throw ConfigError("unknown representation '" + std::string(name) + "' (expected kr+p2v, kr or p2v)");
}

void VectorStore::check(const InputVector& v)
{
    if (m_queries.empty() && m_documents.empty()) {
        m_dims = v.size();
    } else if (v.size() != m_dims) {
        throw DimensionError("input vector of length " + std::to_string(v.size()) + " in a store of length " +
                             std::to_string(m_dims));
    }
}

void VectorStore::set_query(const std::string& id, InputVector v)
{
    check(v);
    m_queries[id] = std::move(v);
}

void VectorStore::set_document(const std::string& id, InputVector v)
{
    check(v);
    m_documents[id] = std::move(v);
}

const InputVector* VectorStore::query(const std::string& id) const
{
    const auto it = m_queries.find(id);
    return it == m_queries.end() ? nullptr : &it->second;
}

const InputVector* VectorStore::document(const std::string& id) const
{
    const auto it = m_documents.find(id);
    return it == m_documents.end() ? nullptr : &it->second;
}

const InputVector& VectorStore::require_query(const std::string& id) const
{
    const auto* v = query(id);
    if (v == nullptr) {
        throw LookupError("no input vector for query '" + id + "'");
    }
    return *v;
}

const InputVector& VectorStore::require_document(const std::string& id) const
{
    const auto* v = document(id);
    if (v == nullptr) {
        throw LookupError("no input vector for document '" + id + "'");
    }
    return *v;
}

namespace {

constexpr std::string_view kStoreMagic = "# dsrim-vectors v1";

void write_rows(std::ostream& out, char kind, const std::map<std::string, InputVector>& rows)
{
    for (const auto& [id, v] : rows) {
        out << kind << '\t' << id << '\t' << v.text_dims << '\t';
        for (std::size_t i = 0; i < v.values.size(); ++i) {
            out << (i > 0 ? " " : "") << format_double(v.values[i]);
        }
        out << '\n';
    }
}

}  // namespace

void save_vector_store(std::ostream& out, const VectorStore& store)
{
    out << kStoreMagic << '\n';
    write_rows(out, 'q', store.queries());
    write_rows(out, 'd', store.documents());
}

VectorStore load_vector_store(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    if (!read_line(in, line, line_no) || line != kStoreMagic) {
        throw ParseError(line_no, "not a dsrim vector store");
    }
    VectorStore store;
    while (read_line(in, line, line_no)) {
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line, '\t');
        if (fields.size() != 4 || (fields[0] != "q" && fields[0] != "d")) {
            throw ParseError(line_no, "vector row must be 'q|d<TAB>id<TAB>text_dims<TAB>floats'");
        }
        InputVector v;
        const auto text_dims = parse_int(fields[2]);
        if (!text_dims || *text_dims < 0) {
            throw ParseError(line_no, "bad text_dims");
        }
        v.text_dims = static_cast<std::size_t>(*text_dims);
        for (auto field : split_whitespace(fields[3])) {
            const auto x = parse_double(field);
            if (!x) {
                throw ParseError(line_no, "bad float '" + std::string(field) + "'");
            }
            v.values.push_back(*x);
        }
        if (v.text_dims > v.values.size()) {
            throw ParseError(line_no, "text_dims exceeds vector length");
        }
        try {
            if (fields[0] == "q") {
                store.set_query(std::string(fields[1]), std::move(v));
            } else {
                store.set_document(std::string(fields[1]), std::move(v));
            }
        } catch (const DimensionError& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return store;
}

}  // namespace dsrim
