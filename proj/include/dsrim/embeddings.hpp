#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dsrim/error.hpp"

namespace dsrim {

using Vector = std::vector<double>;

double dot(std::span<const double> u, std::span<const double> v);
double norm(std::span<const double> u);

/// Cosine similarity; 0 when either vector has zero norm. Raises DimensionError on length mismatch.
double cosine(std::span<const double> u, std::span<const double> v);

/// Keyed dense vectors of one fixed dimensionality. Keys iterate in ascending order.
class EmbeddingTable {
  public:
    explicit EmbeddingTable(std::size_t dims = 0) : m_dims(dims) {}

    std::size_t dims() const noexcept { return m_dims; }
    std::size_t size() const noexcept { return m_vectors.size(); }
    bool contains(const std::string& key) const { return m_vectors.count(key) != 0; }

    /// Inserts or replaces. Wrong length raises DimensionError, non-finite entries raise Error.
    void set(const std::string& key, Vector values);

    const Vector* find(const std::string& key) const;
    /// Raises LookupError naming the key.
    const Vector& at(const std::string& key) const;

    const std::map<std::string, Vector>& entries() const noexcept { return m_vectors; }

  private:
    std::size_t m_dims;
    std::map<std::string, Vector> m_vectors;
};

/// Rows `key<TAB>v1 v2 ... vd`. All rows must agree on d.
EmbeddingTable load_embeddings(std::istream& in);
void save_embeddings(std::ostream& out, const EmbeddingTable& table);

struct PvDbowConfig {
    std::size_t dims = 100;
    std::size_t epochs = 20;
    std::size_t negatives_per_target = 5;
    double learning_rate = 0.025;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Minimal PV-DBOW model: each text vector is trained to score its own tokens
/// above tokens drawn from the unigram^0.75 noise distribution.
class DocEmbeddingModel {
  public:
    const PvDbowConfig& config() const noexcept { return m_config; }
    const EmbeddingTable& vectors() const noexcept { return m_vectors; }
    /// Mean negative log-likelihood per positive target, one entry per epoch.
    const std::vector<double>& epoch_losses() const noexcept { return m_epoch_losses; }
    std::size_t vocabulary_size() const noexcept { return m_words.size(); }

    friend DocEmbeddingModel train_doc_embeddings(const std::map<std::string, std::vector<std::string>>& texts,
                                                  const PvDbowConfig& config, Warnings* warnings);
    friend Vector infer_text_vector(const DocEmbeddingModel& model, const std::vector<std::string>& tokens,
                                    const PvDbowConfig& config, Warnings* warnings);

  private:
    std::size_t sample_noise(double u) const;
    std::vector<std::size_t> lookup(const std::vector<std::string>& tokens) const;

    PvDbowConfig m_config;
    EmbeddingTable m_vectors;
    std::vector<std::string> m_words;
    std::map<std::string, std::size_t> m_word_index;
    std::vector<Vector> m_word_out;
    std::vector<double> m_noise_cdf;
    std::vector<double> m_epoch_losses;
};

/// Requires at least two texts and a non-empty vocabulary (ConfigError otherwise).
/// Texts with no tokens get the zero vector and a warning.
DocEmbeddingModel train_doc_embeddings(const std::map<std::string, std::vector<std::string>>& texts,
                                       const PvDbowConfig& config, Warnings* warnings = nullptr);

/// Fits a fresh text vector against the frozen word state. Out-of-vocabulary
/// tokens are ignored; no known token yields the zero vector and a warning.
Vector infer_text_vector(const DocEmbeddingModel& model, const std::vector<std::string>& tokens,
                         const PvDbowConfig& config, Warnings* warnings = nullptr);

}  // namespace dsrim
