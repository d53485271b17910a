#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace dsrim {

/// Seeded generator with portable draws. std:: distributions are implementation
/// defined, so every draw used by the pipeline goes through these helpers.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : m_engine(seed) {}

    std::uint64_t next() { return m_engine(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(m_engine() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be positive.
    std::size_t below(std::size_t n)
    {
        const auto bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t draw = m_engine();
        while (draw >= limit) {
            draw = m_engine();
        }
        return static_cast<std::size_t>(draw % bound);
    }

    bool bernoulli(double p) { return uniform() < p; }

    template <typename T>
    void shuffle(std::vector<T>& items)
    {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[below(i)]);
        }
    }

    /// First `count` entries of a uniform random permutation of `items` (partial Fisher-Yates).
    template <typename T>
    std::vector<T> sample(std::vector<T> items, std::size_t count)
    {
        if (count > items.size()) {
            count = items.size();
        }
        for (std::size_t i = 0; i < count; ++i) {
            std::swap(items[i], items[i + below(items.size() - i)]);
        }
        items.resize(count);
        return items;
    }

  private:
    std::mt19937_64 m_engine;
};

/// splitmix64 finalizer; derives independent stage seeds from one master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t offset)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (offset + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace dsrim
