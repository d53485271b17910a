#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "dsrim/corpus.hpp"
#include "dsrim/embeddings.hpp"
#include "dsrim/random.hpp"

namespace dsrim {

/// Row-major dense matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    friend bool operator==(const Matrix&, const Matrix&) = default;
};

struct DenseLayer {
    Matrix weights;  // out x in
    Vector bias;     // out

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Weights of the shared branch: layer i maps the previous activation through
/// ReLU(W_i x + b_i). Gradients reuse this shape.
struct SiameseParams {
    std::vector<DenseLayer> layers;

    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().weights.cols; }
    std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().weights.rows; }
    std::size_t parameter_count() const;

    /// Same shapes, all zeros.
    SiameseParams zeros_like() const;
    /// this += scale * other (shapes must match).
    void axpy(double scale, const SiameseParams& other);
    bool all_finite() const;

    friend bool operator==(const SiameseParams&, const SiameseParams&) = default;
};

struct TrainConfig {
    double alpha = 1.0;
    std::size_t n_negatives = 4;
    std::size_t batch_size = 5;
    double dropout = 0.3;
    std::size_t epochs = 50;
    double learning_rate = 0.01;
    std::uint64_t seed = 1;
    /// Divide the negative-similarity sum by n. Off keeps the plain sum.
    bool average_negatives = false;

    void validate() const;
};

/// Glorot-uniform weights (half-width sqrt(6 / (fan_in + fan_out))), zero biases.
SiameseParams init_params(std::size_t input_dim, std::uint64_t seed,
                          const std::vector<std::size_t>& hidden = {64, 64}, std::size_t output_dim = 32);

/// Intermediate values of one branch evaluation, kept for backpropagation.
struct ForwardPass {
    /// activations[0] is the input; activations[i + 1] is the (dropped-out) output of layer i.
    std::vector<Vector> activations;
    /// Pre-activation of each layer.
    std::vector<Vector> pre_activations;
    /// Inverted-dropout multipliers for each hidden layer output; empty when evaluating.
    std::vector<Vector> dropout_masks;

    const Vector& output() const { return activations.back(); }
};

/// Evaluates the branch. When `rng` is non-null, inverted dropout with rate
/// `dropout` is applied to hidden activations (never to the input or output).
ForwardPass forward_pass(const SiameseParams& params, std::span<const double> input, double dropout = 0.0,
                         Rng* rng = nullptr);

/// Latent vector y. Raises DimensionError when the input length is wrong.
Vector forward(const SiameseParams& params, std::span<const double> input, double dropout = 0.0,
               Rng* rng = nullptr);

/// Cosine of the two latent vectors in evaluation mode; 0 when either is all-zero.
double score(const SiameseParams& params, std::span<const double> query, std::span<const double> document);

/// Delta = sim(Q, D+) - sum_p sim(Q, D-_p) (divided by n when averaging).
double delta(const SiameseParams& params, const TrainingInstance& instance, const VectorStore& vectors,
             bool average_negatives = false);

double hinge_loss(double delta_value, double alpha);

struct InstanceGradient {
    SiameseParams gradient;
    double delta = 0.0;
    double loss = 0.0;
};

/// Exact subgradient of the instance hinge loss. With a non-null rng, each of
/// the 2 + n branch evaluations draws its own dropout mask, shared between its
/// forward and backward pass. All-zero when delta >= alpha.
InstanceGradient gradients(const SiameseParams& params, const TrainingInstance& instance,
                           const VectorStore& vectors, const TrainConfig& config, Rng* rng = nullptr);

struct TrainResult {
    SiameseParams params;
    /// Mean training loss per epoch.
    std::vector<double> loss_history;
};

/// Shuffled mini-batch SGD. Each batch applies params -= lr * mean(instance gradients).
/// A non-finite loss raises TrainingError naming the epoch and batch.
TrainResult train(SiameseParams params, const std::vector<TrainingInstance>& instances,
                  const VectorStore& vectors, const TrainConfig& config);

/// Versioned text checkpoint: config, layer shapes, row-major weights, biases.
void save_checkpoint(std::ostream& out, const SiameseParams& params, const TrainConfig& config);
SiameseParams load_checkpoint(std::istream& in, TrainConfig* config = nullptr);

}  // namespace dsrim
