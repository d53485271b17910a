#include "dsrim/net.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "dsrim/text.hpp"

namespace dsrim {

std::size_t SiameseParams::parameter_count() const
{
    std::size_t n = 0;
    for (const auto& layer : layers) {
        n += layer.weights.data.size() + layer.bias.size();
    }
    return n;
}

SiameseParams SiameseParams::zeros_like() const
{
    SiameseParams z;
    for (const auto& layer : layers) {
        z.layers.push_back({Matrix(layer.weights.rows, layer.weights.cols), Vector(layer.bias.size(), 0.0)});
    }
    return z;
}

void SiameseParams::axpy(double scale, const SiameseParams& other)
{
    for (std::size_t l = 0; l < layers.size(); ++l) {
        auto& w = layers[l].weights.data;
        const auto& ow = other.layers[l].weights.data;
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i] += scale * ow[i];
        }
        auto& b = layers[l].bias;
        const auto& ob = other.layers[l].bias;
        for (std::size_t i = 0; i < b.size(); ++i) {
            b[i] += scale * ob[i];
        }
    }
}

bool SiameseParams::all_finite() const
{
    for (const auto& layer : layers) {
        for (double x : layer.weights.data) {
            if (!std::isfinite(x)) {
                return false;
            }
        }
        for (double x : layer.bias) {
            if (!std::isfinite(x)) {
                return false;
            }
        }
    }
    return true;
}

void TrainConfig::validate() const
{
    if (!(alpha > 0.0)) {
        throw ConfigError("margin alpha must be positive");
    }
    if (n_negatives == 0) {
        throw ConfigError("n_negatives must be at least 1");
    }
    if (batch_size == 0) {
        throw ConfigError("batch_size must be at least 1");
    }
    if (!(dropout >= 0.0 && dropout < 1.0)) {
        throw ConfigError("dropout must lie in [0, 1)");
    }
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("learning_rate must be a non-negative finite number");
    }
}

SiameseParams init_params(std::size_t input_dim, std::uint64_t seed, const std::vector<std::size_t>& hidden,
                          std::size_t output_dim)
{
    if (input_dim == 0) {
        throw ConfigError("input dimension must be positive");
    }
    Rng rng(seed);
    SiameseParams p;
    std::vector<std::size_t> sizes{input_dim};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(output_dim);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const std::size_t fan_in = sizes[l];
        const std::size_t fan_out = sizes[l + 1];
        const double half_width = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        DenseLayer layer{Matrix(fan_out, fan_in), Vector(fan_out, 0.0)};
        for (double& w : layer.weights.data) {
            w = rng.uniform(-half_width, half_width);
        }
        p.layers.push_back(std::move(layer));
    }
    return p;
}

ForwardPass forward_pass(const SiameseParams& params, std::span<const double> input, double dropout, Rng* rng)
{
    if (input.size() != params.input_dim()) {
        throw DimensionError("input of length " + std::to_string(input.size()) + " for a network expecting " +
                             std::to_string(params.input_dim()));
    }
    ForwardPass pass;
    pass.activations.emplace_back(input.begin(), input.end());
    const std::size_t last = params.layers.size() - 1;
    const bool drop = rng != nullptr && dropout > 0.0;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const auto& layer = params.layers[l];
        const Vector& x = pass.activations.back();
        Vector z(layer.weights.rows);
        for (std::size_t r = 0; r < layer.weights.rows; ++r) {
            const double* row = &layer.weights.data[r * layer.weights.cols];
            double sum = layer.bias[r];
            for (std::size_t c = 0; c < layer.weights.cols; ++c) {
                sum += row[c] * x[c];
            }
            z[r] = sum;
        }
        Vector a(z.size());
        for (std::size_t r = 0; r < z.size(); ++r) {
            a[r] = z[r] > 0.0 ? z[r] : 0.0;
        }
        if (l != last && rng != nullptr) {
            Vector mask(a.size(), 1.0);
            if (drop) {
                const double keep_scale = 1.0 / (1.0 - dropout);
                for (std::size_t r = 0; r < a.size(); ++r) {
                    mask[r] = rng->bernoulli(dropout) ? 0.0 : keep_scale;
                    a[r] *= mask[r];
                }
            }
            pass.dropout_masks.push_back(std::move(mask));
        }
        pass.pre_activations.push_back(std::move(z));
        pass.activations.push_back(std::move(a));
    }
    return pass;
}

Vector forward(const SiameseParams& params, std::span<const double> input, double dropout, Rng* rng)
{
    return forward_pass(params, input, dropout, rng).output();
}

double score(const SiameseParams& params, std::span<const double> query, std::span<const double> document)
{
    return cosine(forward(params, query), forward(params, document));
}

double delta(const SiameseParams& params, const TrainingInstance& instance, const VectorStore& vectors,
             bool average_negatives)
{
    const auto& q = vectors.require_query(instance.query).values;
    const Vector yq = forward(params, q);
    double result = cosine(yq, forward(params, vectors.require_document(instance.positive).values));
    double negatives = 0.0;
    for (const auto& doc : instance.negatives) {
        negatives += cosine(yq, forward(params, vectors.require_document(doc).values));
    }
    if (average_negatives && !instance.negatives.empty()) {
        negatives /= static_cast<double>(instance.negatives.size());
    }
    return result - negatives;
}

double hinge_loss(double delta_value, double alpha)
{
    return std::max(0.0, alpha - delta_value);
}

namespace {

/// d cos(u, v) / du, zero when either vector is zero.
Vector cosine_grad(const Vector& u, const Vector& v, double cos_uv)
{
    Vector g(u.size(), 0.0);
    const double nu = norm(u);
    const double nv = norm(v);
    if (nu == 0.0 || nv == 0.0) {
        return g;
    }
    const double inv = 1.0 / (nu * nv);
    const double self = cos_uv / (nu * nu);
    for (std::size_t i = 0; i < u.size(); ++i) {
        g[i] = v[i] * inv - self * u[i];
    }
    return g;
}

void backward(const SiameseParams& params, const ForwardPass& pass, Vector upstream, SiameseParams& grad)
{
    for (std::size_t l = params.layers.size(); l-- > 0;) {
        const auto& layer = params.layers[l];
        const Vector& z = pass.pre_activations[l];
        Vector dz(z.size());
        for (std::size_t r = 0; r < z.size(); ++r) {
            dz[r] = z[r] > 0.0 ? upstream[r] : 0.0;
        }
        const Vector& input = pass.activations[l];
        auto& gw = grad.layers[l].weights;
        auto& gb = grad.layers[l].bias;
        for (std::size_t r = 0; r < layer.weights.rows; ++r) {
            if (dz[r] == 0.0) {
                continue;
            }
            gb[r] += dz[r];
            double* row = &gw.data[r * gw.cols];
            for (std::size_t c = 0; c < gw.cols; ++c) {
                row[c] += dz[r] * input[c];
            }
        }
        if (l == 0) {
            break;
        }
        Vector down(layer.weights.cols, 0.0);
        for (std::size_t r = 0; r < layer.weights.rows; ++r) {
            if (dz[r] == 0.0) {
                continue;
            }
            const double* row = &layer.weights.data[r * layer.weights.cols];
            for (std::size_t c = 0; c < layer.weights.cols; ++c) {
                down[c] += row[c] * dz[r];
            }
        }
        // The input of layer l is the dropped-out output of hidden layer l - 1.
        if (!pass.dropout_masks.empty()) {
            const Vector& mask = pass.dropout_masks[l - 1];
            for (std::size_t c = 0; c < down.size(); ++c) {
                down[c] *= mask[c];
            }
        }
        upstream = std::move(down);
    }
}

}  // namespace

InstanceGradient gradients(const SiameseParams& params, const TrainingInstance& instance,
                           const VectorStore& vectors, const TrainConfig& config, Rng* rng)
{
    InstanceGradient out;
    out.gradient = params.zeros_like();
    const double dropout = rng != nullptr ? config.dropout : 0.0;

    const ForwardPass query = forward_pass(params, vectors.require_query(instance.query).values, dropout, rng);
    std::vector<ForwardPass> docs;
    docs.push_back(forward_pass(params, vectors.require_document(instance.positive).values, dropout, rng));
    for (const auto& doc : instance.negatives) {
        docs.push_back(forward_pass(params, vectors.require_document(doc).values, dropout, rng));
    }

    const double neg_weight =
        config.average_negatives && !instance.negatives.empty() ? 1.0 / static_cast<double>(instance.negatives.size())
                                                                : 1.0;
    const Vector& yq = query.output();
    std::vector<double> sims;
    for (const auto& d : docs) {
        sims.push_back(cosine(yq, d.output()));
    }
    out.delta = sims[0];
    for (std::size_t p = 1; p < sims.size(); ++p) {
        out.delta -= neg_weight * sims[p];
    }
    out.loss = hinge_loss(out.delta, config.alpha);
    if (out.loss <= 0.0) {
        return out;
    }

    // dL/dsim is -1 for the positive pair and +neg_weight for each negative pair.
    Vector dq(yq.size(), 0.0);
    for (std::size_t p = 0; p < docs.size(); ++p) {
        const double coeff = p == 0 ? -1.0 : neg_weight;
        const Vector& yd = docs[p].output();
        const Vector gq = cosine_grad(yq, yd, sims[p]);
        for (std::size_t i = 0; i < dq.size(); ++i) {
            dq[i] += coeff * gq[i];
        }
        Vector gd = cosine_grad(yd, yq, sims[p]);
        for (double& x : gd) {
            x *= coeff;
        }
        backward(params, docs[p], std::move(gd), out.gradient);
    }
    backward(params, query, std::move(dq), out.gradient);
    return out;
}

TrainResult train(SiameseParams params, const std::vector<TrainingInstance>& instances,
                  const VectorStore& vectors, const TrainConfig& config)
{
    config.validate();
    if (instances.empty()) {
        throw TrainingError("no training instances");
    }
    Rng rng(config.seed);
    TrainResult result;
    std::vector<std::size_t> order(instances.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            SiameseParams batch_grad = params.zeros_like();
            double batch_loss = 0.0;
            for (std::size_t i = start; i < end; ++i) {
                const InstanceGradient g = gradients(params, instances[order[i]], vectors, config, &rng);
                batch_loss += g.loss;
                batch_grad.axpy(1.0, g.gradient);
            }
            if (!std::isfinite(batch_loss) || !batch_grad.all_finite()) {
                throw TrainingError("non-finite loss at epoch " + std::to_string(epoch + 1) + ", batch " +
                                    std::to_string(batch_index + 1));
            }
            epoch_loss += batch_loss;
            params.axpy(-config.learning_rate / static_cast<double>(end - start), batch_grad);
        }
        result.loss_history.push_back(epoch_loss / static_cast<double>(instances.size()));
    }
    result.params = std::move(params);
    return result;
}

namespace {

constexpr std::string_view kCheckpointMagic = "# dsrim-checkpoint v1";

void write_values(std::ostream& out, const std::vector<double>& values, std::size_t begin, std::size_t count)
{
    for (std::size_t i = 0; i < count; ++i) {
        out << (i > 0 ? " " : "") << format_double(values[begin + i]);
    }
    out << '\n';
}

std::vector<double> read_values(std::istream& in, std::size_t& line_no, std::size_t expected)
{
    std::string line;
    if (!read_line(in, line, line_no)) {
        throw ParseError(line_no, "truncated checkpoint");
    }
    std::vector<double> values;
    for (auto field : split_whitespace(line)) {
        const auto x = parse_double(field);
        if (!x) {
            throw ParseError(line_no, "bad float '" + std::string(field) + "'");
        }
        values.push_back(*x);
    }
    if (values.size() != expected) {
        throw ParseError(line_no, "expected " + std::to_string(expected) + " values, found " +
                                      std::to_string(values.size()));
    }
    return values;
}

}  // namespace

void save_checkpoint(std::ostream& out, const SiameseParams& params, const TrainConfig& config)
{
    out << kCheckpointMagic << '\n';
    out << "alpha=" << format_double(config.alpha) << '\n';
    out << "n_negatives=" << config.n_negatives << '\n';
    out << "batch_size=" << config.batch_size << '\n';
    out << "dropout=" << format_double(config.dropout) << '\n';
    out << "epochs=" << config.epochs << '\n';
    out << "learning_rate=" << format_double(config.learning_rate) << '\n';
    out << "seed=" << config.seed << '\n';
    out << "average_negatives=" << (config.average_negatives ? 1 : 0) << '\n';
    out << "layers=" << params.layers.size() << '\n';
    for (const auto& layer : params.layers) {
        out << "layer " << layer.weights.rows << ' ' << layer.weights.cols << '\n';
        for (std::size_t r = 0; r < layer.weights.rows; ++r) {
            write_values(out, layer.weights.data, r * layer.weights.cols, layer.weights.cols);
        }
        write_values(out, layer.bias, 0, layer.bias.size());
    }
}

SiameseParams load_checkpoint(std::istream& in, TrainConfig* config)
{
    std::string line;
    std::size_t line_no = 0;
    if (!read_line(in, line, line_no) || line != kCheckpointMagic) {
        throw ParseError(line_no, "not a dsrim checkpoint");
    }
    TrainConfig cfg;
    std::size_t layers = 0;
    while (true) {
        if (!read_line(in, line, line_no)) {
            throw ParseError(line_no, "truncated checkpoint header");
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(line_no, "expected key=value");
        }
        const std::string key = line.substr(0, eq);
        const std::string_view value = std::string_view(line).substr(eq + 1);
        const auto number = parse_double(value);
        if (!number) {
            throw ParseError(line_no, "bad value for '" + key + "'");
        }
        if (key == "alpha") {
            cfg.alpha = *number;
        } else if (key == "n_negatives") {
            cfg.n_negatives = static_cast<std::size_t>(*number);
        } else if (key == "batch_size") {
            cfg.batch_size = static_cast<std::size_t>(*number);
        } else if (key == "dropout") {
            cfg.dropout = *number;
        } else if (key == "epochs") {
            cfg.epochs = static_cast<std::size_t>(*number);
        } else if (key == "learning_rate") {
            cfg.learning_rate = *number;
        } else if (key == "seed") {
            std::uint64_t seed = 0;
            const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
            if (ec != std::errc() || ptr != value.data() + value.size()) {
                throw ParseError(line_no, "bad seed");
            }
            cfg.seed = seed;
        } else if (key == "average_negatives") {
            cfg.average_negatives = *number != 0.0;
        } else if (key == "layers") {
            layers = static_cast<std::size_t>(*number);
            break;
        } else {
            throw ParseError(line_no, "unknown checkpoint key '" + key + "'");
        }
    }
    SiameseParams params;
    for (std::size_t l = 0; l < layers; ++l) {
        if (!read_line(in, line, line_no)) {
            throw ParseError(line_no, "truncated checkpoint");
        }
        const auto fields = split_whitespace(line);
        const auto rows = fields.size() == 3 ? parse_int(fields[1]) : std::nullopt;
        const auto cols = fields.size() == 3 ? parse_int(fields[2]) : std::nullopt;
        if (fields.size() != 3 || fields[0] != "layer" || !rows || !cols || *rows <= 0 || *cols <= 0) {
            throw ParseError(line_no, "expected 'layer <rows> <cols>'");
        }
        DenseLayer layer{Matrix(static_cast<std::size_t>(*rows), static_cast<std::size_t>(*cols)), {}};
        if (!params.layers.empty() && params.layers.back().weights.rows != layer.weights.cols) {
            throw ParseError(line_no, "layer shapes do not chain");
        }
        for (std::size_t r = 0; r < layer.weights.rows; ++r) {
            const auto row = read_values(in, line_no, layer.weights.cols);
            std::copy(row.begin(), row.end(), layer.weights.data.begin() + static_cast<std::ptrdiff_t>(r * layer.weights.cols));
        }
        layer.bias = read_values(in, line_no, layer.weights.rows);
        params.layers.push_back(std::move(layer));
    }
    if (config != nullptr) {
        *config = cfg;
    }
    return params;
}

}  // namespace dsrim
