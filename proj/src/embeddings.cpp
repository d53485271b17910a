#include "dsrim/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dsrim/random.hpp"
#include "dsrim/text.hpp"

namespace dsrim {

double dot(std::span<const double> u, std::span<const double> v)
{
    if (u.size() != v.size()) {
        throw DimensionError("vector length mismatch: " + std::to_string(u.size()) + " vs " +
                             std::to_string(v.size()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        sum += u[i] * v[i];
    }
    return sum;
}

double norm(std::span<const double> u)
{
    double sum = 0.0;
    for (double x : u) {
        sum += x * x;
    }
    return std::sqrt(sum);
}

double cosine(std::span<const double> u, std::span<const double> v)
{
    const double uv = dot(u, v);
    const double nu = norm(u);
    const double nv = norm(v);
    if (nu == 0.0 || nv == 0.0) {
        return 0.0;
    }
    return std::clamp(uv / (nu * nv), -1.0, 1.0);
}

void EmbeddingTable::set(const std::string& key, Vector values)
{
    if (values.size() != m_dims) {
        throw DimensionError("vector for '" + key + "' has " + std::to_string(values.size()) +
                             " components, table expects " + std::to_string(m_dims));
    }
    for (double x : values) {
        if (!std::isfinite(x)) {
            throw Error("non-finite component in vector for '" + key + "'");
        }
    }
    m_vectors[key] = std::move(values);
}

const Vector* EmbeddingTable::find(const std::string& key) const
{
    const auto it = m_vectors.find(key);
    return it == m_vectors.end() ? nullptr : &it->second;
}

const Vector& EmbeddingTable::at(const std::string& key) const
{
    const Vector* v = find(key);
    if (v == nullptr) {
        throw LookupError("no vector for '" + key + "'");
    }
    return *v;
}

EmbeddingTable load_embeddings(std::istream& in)
{
    std::vector<std::pair<std::string, Vector>> rows;
    std::size_t dims = 0;
    std::string line;
    std::size_t line_no = 0;
    while (read_line(in, line, line_no)) {
        if (trim(line).empty()) {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            throw ParseError(line_no, "embedding row must be 'key<TAB>floats'");
        }
        Vector values;
        for (auto field : split_whitespace(std::string_view(line).substr(tab + 1))) {
            const auto x = parse_double(field);
            if (!x || !std::isfinite(*x)) {
                throw ParseError(line_no, "bad float '" + std::string(field) + "'");
            }
            values.push_back(*x);
        }
        if (values.empty()) {
            throw ParseError(line_no, "embedding row has no components");
        }
        if (rows.empty()) {
            dims = values.size();
        } else if (values.size() != dims) {
            throw ParseError(line_no, "expected " + std::to_string(dims) + " components, found " +
                                          std::to_string(values.size()));
        }
        rows.emplace_back(line.substr(0, tab), std::move(values));
    }
    EmbeddingTable table(dims);
    for (auto& [key, values] : rows) {
        table.set(key, std::move(values));
    }
    return table;
}

void save_embeddings(std::ostream& out, const EmbeddingTable& table)
{
    for (const auto& [key, values] : table.entries()) {
        out << key << '\t';
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i > 0) {
                out << ' ';
            }
            out << format_double(values[i]);
        }
        out << '\n';
    }
}

void PvDbowConfig::validate() const
{
    if (dims == 0) {
        throw ConfigError("embedding dims must be positive");
    }
    if (!(learning_rate > 0.0)) {
        throw ConfigError("embedding learning rate must be positive");
    }
}

namespace {

double sigmoid(double x)
{
    return 1.0 / (1.0 + std::exp(-x));
}

/// -log(sigmoid(x)), stable for large |x|.
double neg_log_sigmoid(double x)
{
    return x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

/// One negative-sampling step for text vector `doc` against every token of a text.
/// Accumulates the loss of the positive and sampled targets and returns it.
template <typename NoiseFn>
double fit_tokens(Vector& doc, std::vector<Vector>* word_out, const std::vector<Vector>& frozen_out,
                  const std::vector<std::size_t>& tokens, std::size_t negatives, double lr, Rng& rng,
                  NoiseFn&& noise)
{
    const std::size_t dims = doc.size();
    Vector doc_grad(dims);
    double loss = 0.0;
    for (const std::size_t target : tokens) {
        std::fill(doc_grad.begin(), doc_grad.end(), 0.0);
        for (std::size_t s = 0; s <= negatives; ++s) {
            std::size_t word = target;
            double label = 1.0;
            if (s > 0) {
                word = noise(rng.uniform());
                if (word == target) {
                    continue;
                }
                label = 0.0;
            }
            const Vector& out = word_out != nullptr ? (*word_out)[word] : frozen_out[word];
            double score = 0.0;
            for (std::size_t i = 0; i < dims; ++i) {
                score += doc[i] * out[i];
            }
            loss += label > 0.5 ? neg_log_sigmoid(score) : neg_log_sigmoid(-score);
            const double g = (label - sigmoid(score)) * lr;
            for (std::size_t i = 0; i < dims; ++i) {
                doc_grad[i] += g * out[i];
            }
            if (word_out != nullptr) {
                Vector& mutable_out = (*word_out)[word];
                for (std::size_t i = 0; i < dims; ++i) {
                    mutable_out[i] += g * doc[i];
                }
            }
        }
        for (std::size_t i = 0; i < dims; ++i) {
            doc[i] += doc_grad[i];
        }
    }
    return loss;
}

Vector random_init(std::size_t dims, Rng& rng)
{
    Vector v(dims);
    for (double& x : v) {
        x = (rng.uniform() - 0.5) / static_cast<double>(dims);
    }
    return v;
}

}  // namespace

std::size_t DocEmbeddingModel::sample_noise(double u) const
{
    const double target = u * m_noise_cdf.back();
    const auto it = std::upper_bound(m_noise_cdf.begin(), m_noise_cdf.end(), target);
    const auto index = static_cast<std::size_t>(it - m_noise_cdf.begin());
    return std::min(index, m_noise_cdf.size() - 1);
}

std::vector<std::size_t> DocEmbeddingModel::lookup(const std::vector<std::string>& tokens) const
{
    std::vector<std::size_t> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) {
        const auto it = m_word_index.find(t);
        if (it != m_word_index.end()) {
            ids.push_back(it->second);
        }
    }
    return ids;
}

DocEmbeddingModel train_doc_embeddings(const std::map<std::string, std::vector<std::string>>& texts,
                                       const PvDbowConfig& config, Warnings* warnings)
{
    config.validate();
    if (texts.size() < 2) {
        throw ConfigError("document embedding training needs at least 2 texts");
    }

    DocEmbeddingModel model;
    model.m_config = config;
    std::map<std::string, std::size_t> counts;
    for (const auto& [key, tokens] : texts) {
        for (const auto& t : tokens) {
            ++counts[t];
        }
    }
    if (counts.empty()) {
        throw ConfigError("document embedding training needs a non-empty vocabulary");
    }
    double cumulative = 0.0;
    for (const auto& [word, count] : counts) {
        model.m_word_index.emplace(word, model.m_words.size());
        model.m_words.push_back(word);
        cumulative += std::pow(static_cast<double>(count), 0.75);
        model.m_noise_cdf.push_back(cumulative);
    }
    model.m_word_out.assign(model.m_words.size(), Vector(config.dims, 0.0));

    Rng rng(config.seed);
    std::vector<std::string> keys;
    std::vector<std::vector<std::size_t>> encoded;
    std::vector<Vector> docs;
    std::size_t total_tokens = 0;
    for (const auto& [key, tokens] : texts) {
        keys.push_back(key);
        encoded.push_back(model.lookup(tokens));
        total_tokens += tokens.size();
        if (tokens.empty()) {
            warn(warnings, "text '" + key + "' has no tokens; assigned the zero vector");
            docs.emplace_back(config.dims, 0.0);
        } else {
            docs.push_back(random_init(config.dims, rng));
        }
    }

    auto noise = [&model](double u) { return model.sample_noise(u); };
    const double total_work = static_cast<double>(total_tokens) * static_cast<double>(config.epochs);
    double done = 0.0;
    std::vector<std::size_t> order(keys.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        double loss = 0.0;
        for (const std::size_t d : order) {
            if (encoded[d].empty()) {
                continue;
            }
            // Linear decay, floored at 1e-4 of the initial rate.
            const double lr = config.learning_rate * std::max(1e-4, 1.0 - done / total_work);
            loss += fit_tokens(docs[d], &model.m_word_out, model.m_word_out, encoded[d],
                               config.negatives_per_target, lr, rng, noise);
            done += static_cast<double>(encoded[d].size());
        }
        model.m_epoch_losses.push_back(total_tokens == 0 ? 0.0 : loss / static_cast<double>(total_tokens));
    }

    model.m_vectors = EmbeddingTable(config.dims);
    for (std::size_t i = 0; i < keys.size(); ++i) {
        model.m_vectors.set(keys[i], std::move(docs[i]));
    }
    return model;
}

Vector infer_text_vector(const DocEmbeddingModel& model, const std::vector<std::string>& tokens,
                         const PvDbowConfig& config, Warnings* warnings)
{
    config.validate();
    if (config.dims != model.m_config.dims) {
        throw DimensionError("inference dims differ from the trained model");
    }
    const auto ids = model.lookup(tokens);
    if (ids.empty()) {
        warn(warnings, "no in-vocabulary tokens; inferred the zero vector");
        return Vector(config.dims, 0.0);
    }
    Rng rng(mix_seed(config.seed, 0x1f));
    Vector doc = random_init(config.dims, rng);
    auto noise = [&model](double u) { return model.sample_noise(u); };
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const double lr = config.learning_rate *
                          std::max(1e-4, 1.0 - static_cast<double>(epoch) / static_cast<double>(config.epochs));
        fit_tokens(doc, nullptr, model.m_word_out, ids, config.negatives_per_target, lr, rng, noise);
    }
    return doc;
}

}  // namespace dsrim
