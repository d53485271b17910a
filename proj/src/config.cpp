#include "dsrim/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "dsrim/corpus.hpp"
#include "dsrim/error.hpp"
#include "dsrim/relmap.hpp"
#include "dsrim/text.hpp"

namespace dsrim {

namespace {

struct Field {
    std::string key;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, std::string_view)> set;
};

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected)
{
    throw ConfigError("config key '" + std::string(key) + "': '" + std::string(value) + "' is not " +
                      std::string(expected));
}

std::size_t to_count(std::string_view key, std::string_view value)
{
    const auto v = parse_int(value);
    if (!v || *v < 0) {
        bad_value(key, value, "a non-negative integer");
    }
    return static_cast<std::size_t>(*v);
}

double to_real(std::string_view key, std::string_view value)
{
    const auto v = parse_double(value);
    if (!v) {
        bad_value(key, value, "a number");
    }
    return *v;
}

bool to_bool(std::string_view key, std::string_view value)
{
    if (value == "true" || value == "1" || value == "yes") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no") {
        return false;
    }
    bad_value(key, value, "a boolean");
}

template <typename T>
Field string_field(std::string key, T ExperimentConfig::*member)
{
    return {key, [member](const ExperimentConfig& c) { return c.*member; },
            [member](ExperimentConfig& c, std::string_view v) { c.*member = std::string(v); }};
}

Field count_field(std::string key, std::size_t ExperimentConfig::*member)
{
    return {key, [member](const ExperimentConfig& c) { return std::to_string(c.*member); },
            [key, member](ExperimentConfig& c, std::string_view v) { c.*member = to_count(key, v); }};
}

Field real_field(std::string key, double ExperimentConfig::*member)
{
    return {key, [member](const ExperimentConfig& c) { return format_double(c.*member); },
            [key, member](ExperimentConfig& c, std::string_view v) { c.*member = to_real(key, v); }};
}

Field bool_field(std::string key, bool ExperimentConfig::*member)
{
    return {key, [member](const ExperimentConfig& c) { return std::string(c.*member ? "true" : "false"); },
            [key, member](ExperimentConfig& c, std::string_view v) { c.*member = to_bool(key, v); }};
}

const std::vector<Field>& fields()
{
    static const std::vector<Field> table = [] {
        std::vector<Field> f;
        f.push_back(string_field("nodes", &ExperimentConfig::nodes));
        f.push_back(string_field("edges", &ExperimentConfig::edges));
        f.push_back(string_field("documents", &ExperimentConfig::documents));
        f.push_back(string_field("queries", &ExperimentConfig::queries));
        f.push_back(string_field("annotations", &ExperimentConfig::annotations));
        f.push_back(string_field("qrels", &ExperimentConfig::qrels));
        f.push_back(string_field("object_embeddings", &ExperimentConfig::object_embeddings));
        f.push_back(string_field("output_dir", &ExperimentConfig::output_dir));
        f.push_back(string_field("relation", &ExperimentConfig::relation));
        f.push_back(bool_field("include_query_annotations", &ExperimentConfig::include_query_annotations));
        f.push_back(count_field("k", &ExperimentConfig::k));
        f.push_back(string_field("strategy", &ExperimentConfig::strategy));
        f.push_back(count_field("kmeans_max_iter", &ExperimentConfig::kmeans_max_iter));
        f.push_back(count_field("dims", &ExperimentConfig::dims));
        f.push_back(count_field("pv_epochs", &ExperimentConfig::pv_epochs));
        f.push_back(count_field("pv_negatives", &ExperimentConfig::pv_negatives));
        f.push_back(real_field("pv_learning_rate", &ExperimentConfig::pv_learning_rate));
        f.push_back(string_field("representation", &ExperimentConfig::representation));
        f.push_back(real_field("alpha", &ExperimentConfig::alpha));
        f.push_back(count_field("n", &ExperimentConfig::n));
        f.push_back(count_field("batch", &ExperimentConfig::batch));
        f.push_back(real_field("dropout", &ExperimentConfig::dropout));
        f.push_back(count_field("epochs", &ExperimentConfig::epochs));
        f.push_back(real_field("learning_rate", &ExperimentConfig::learning_rate));
        f.push_back(bool_field("average_negatives", &ExperimentConfig::average_negatives));
        f.push_back(count_field("folds", &ExperimentConfig::folds));
        f.push_back(count_field("top_candidates", &ExperimentConfig::top_candidates));
        f.push_back(count_field("top_rerank", &ExperimentConfig::top_rerank));
        f.push_back(real_field("bm25_k1", &ExperimentConfig::bm25_k1));
        f.push_back(real_field("bm25_b", &ExperimentConfig::bm25_b));
        f.push_back(count_field("analysis_pivots", &ExperimentConfig::analysis_pivots));
        f.push_back(count_field("analysis_neighborhood", &ExperimentConfig::analysis_neighborhood));
        f.push_back({"analysis_ks",
                     [](const ExperimentConfig& c) {
                         std::string s;
                         for (const auto k : c.analysis_ks) {
                             s += (s.empty() ? "" : ",") + std::to_string(k);
                         }
                         return s;
                     },
                     [](ExperimentConfig& c, std::string_view v) {
                         c.analysis_ks.clear();
                         for (const auto part : split(v, ',')) {
                             c.analysis_ks.push_back(to_count("analysis_ks", trim(part)));
                         }
                     }});
        f.push_back({"seed", [](const ExperimentConfig& c) { return std::to_string(c.seed); },
                     [](ExperimentConfig& c, std::string_view v) { c.seed = to_count("seed", v); }});
        return f;
    }();
    return table;
}

const Field& field(const std::string& key)
{
    for (const auto& f : fields()) {
        if (f.key == key) {
            return f;
        }
    }
    throw ConfigError("unknown config key '" + key + "'");
}

void require(bool condition, const std::string& message)
{
    if (!condition) {
        throw ConfigError(message);
    }
}

}  // namespace

std::filesystem::path ExperimentConfig::resolve(const std::string& path) const
{
    const std::filesystem::path p(path);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

void ExperimentConfig::validate() const
{
    require(k >= 1, "k must be at least 1");
    parse_strategy(strategy);
    parse_representation(representation);
    require(!relation.empty(), "relation must not be empty");
    require(kmeans_max_iter >= 1, "kmeans_max_iter must be at least 1");
    require(dims >= 1, "dims must be at least 1");
    require(pv_epochs >= 1, "pv_epochs must be at least 1");
    require(pv_negatives >= 1, "pv_negatives must be at least 1");
    require(pv_learning_rate > 0.0, "pv_learning_rate must be positive");
    require(alpha > 0.0, "alpha must be positive");
    require(n >= 1, "n must be at least 1");
    require(batch >= 1, "batch must be at least 1");
    require(dropout >= 0.0 && dropout < 1.0, "dropout must be in [0, 1)");
    require(epochs >= 1, "epochs must be at least 1");
    require(learning_rate >= 0.0, "learning_rate must be non-negative");
    require(folds >= 2, "folds must be at least 2");
    require(top_candidates >= 1, "top_candidates must be at least 1");
    require(top_rerank >= 1, "top_rerank must be at least 1");
    require(bm25_k1 >= 0.0, "bm25_k1 must be non-negative");
    require(bm25_b >= 0.0 && bm25_b <= 1.0, "bm25_b must be in [0, 1]");
    require(analysis_pivots >= 1, "analysis_pivots must be at least 1");
    require(analysis_neighborhood >= 1, "analysis_neighborhood must be at least 1");
    require(!analysis_ks.empty(), "analysis_ks must list at least one k");
    for (const auto value : analysis_ks) {
        require(value >= 1, "analysis_ks entries must be at least 1");
    }
    require(!output_dir.empty(), "output_dir must not be empty");
}

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& f : fields()) {
            out.push_back(f.key);
        }
        return out;
    }();
    return keys;
}

void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value)
{
    field(key).set(config, trim(value));
}

std::string get_config_value(const ExperimentConfig& config, const std::string& key)
{
    return field(key).get(config);
}

ExperimentConfig read_config(std::istream& in)
{
    ExperimentConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (read_line(in, line, line_no)) {
        if (is_comment_or_blank(line)) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(line_no, "expected 'key = value'");
        }
        const std::string key(trim(std::string_view(line).substr(0, eq)));
        const std::string value(trim(std::string_view(line).substr(eq + 1)));
        try {
            set_config_value(config, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return config;
}

ExperimentConfig load_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    ExperimentConfig config = read_config(in);
    config.base_dir = path.parent_path();
    return config;
}

void write_config(std::ostream& out, const ExperimentConfig& config)
{
    for (const auto& f : fields()) {
        out << f.key << " = " << f.get(config) << '\n';
    }
}

std::string canonical_config(const ExperimentConfig& config)
{
    std::ostringstream out;
    for (const auto& f : fields()) {
        out << f.key << '=' << f.get(config) << '\n';
    }
    return out.str();
}

std::string config_hash(const ExperimentConfig& config)
{
    return hex64(fnv1a(canonical_config(config)));
}

}  // namespace dsrim
