#include "dsrim/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "dsrim/random.hpp"

namespace dsrim {

double squared_distance(const Vector& a, const Vector& b)
{
    if (a.size() != b.size()) {
        throw DimensionError("point length mismatch in k-means");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

double kmeans_objective(const std::vector<Vector>& points, const std::vector<std::size_t>& assignments,
                        const std::vector<Vector>& centroids)
{
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        total += squared_distance(points[i], centroids[assignments[i]]);
    }
    return total;
}

namespace {

std::size_t nearest(const Vector& p, const std::vector<Vector>& centroids)
{
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = squared_distance(p, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

std::vector<Vector> seed_plus_plus(const std::vector<Vector>& points, std::size_t k, Rng& rng)
{
    std::vector<Vector> centroids;
    centroids.push_back(points[rng.below(points.size())]);
    std::vector<double> d2(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        d2[i] = squared_distance(points[i], centroids[0]);
    }
    while (centroids.size() < k) {
        double total = 0.0;
        for (double d : d2) {
            total += d;
        }
        const double target = rng.uniform() * total;
        std::size_t pick = points.size();
        double acc = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (d2[i] <= 0.0) {
                continue;
            }
            acc += d2[i];
            pick = i;
            if (acc > target) {
                break;
            }
        }
        centroids.push_back(points[pick]);
        for (std::size_t i = 0; i < points.size(); ++i) {
            d2[i] = std::min(d2[i], squared_distance(points[i], centroids.back()));
        }
    }
    return centroids;
}

void update_centroids(const std::vector<Vector>& points, const std::vector<std::size_t>& assignments,
                      std::vector<Vector>& centroids)
{
    const std::size_t dims = points.front().size();
    std::vector<std::size_t> counts(centroids.size(), 0);
    for (auto& c : centroids) {
        std::fill(c.begin(), c.end(), 0.0);
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        Vector& c = centroids[assignments[i]];
        for (std::size_t d = 0; d < dims; ++d) {
            c[d] += points[i][d];
        }
        ++counts[assignments[i]];
    }
    for (std::size_t j = 0; j < centroids.size(); ++j) {
        for (double& x : centroids[j]) {
            x /= static_cast<double>(counts[j]);
        }
    }
}

}  // namespace

KMeansResult kmeans(const std::vector<Vector>& points, std::size_t k, std::size_t max_iter, std::uint64_t seed)
{
    if (k == 0) {
        throw ConfigError("k-means needs k >= 1");
    }
    if (points.empty()) {
        throw ConfigError("k-means needs at least one point");
    }
    for (const auto& p : points) {
        if (p.size() != points.front().size()) {
            throw DimensionError("points of different dimensionality given to k-means");
        }
    }
    const std::set<Vector> distinct(points.begin(), points.end());
    if (k > distinct.size()) {
        throw ConfigError("k-means with k=" + std::to_string(k) + " but only " + std::to_string(distinct.size()) +
                          " distinct points");
    }

    Rng rng(seed);
    KMeansResult result;
    result.centroids = seed_plus_plus(points, k, rng);
    result.assignments.assign(points.size(), 0);
    bool first = true;
    while (result.iterations < max_iter) {
        std::vector<std::size_t> next(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
            next[i] = nearest(points[i], result.centroids);
        }

        // Re-seed empty clusters at the farthest point of a multi-member cluster.
        std::vector<std::size_t> counts(k, 0);
        for (auto a : next) {
            ++counts[a];
        }
        for (std::size_t j = 0; j < k; ++j) {
            if (counts[j] != 0) {
                continue;
            }
            std::size_t far = points.size();
            double far_d = -1.0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                if (counts[next[i]] < 2) {
                    continue;
                }
                const double d = squared_distance(points[i], result.centroids[next[i]]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            --counts[next[far]];
            next[far] = j;
            counts[j] = 1;
            result.centroids[j] = points[far];
        }

        const bool changed = first || next != result.assignments;
        first = false;
        result.assignments = std::move(next);
        ++result.iterations;
        if (!changed) {
            result.converged = true;
            result.objective_history.push_back(
                kmeans_objective(points, result.assignments, result.centroids));
            break;
        }
        update_centroids(points, result.assignments, result.centroids);
        result.objective_history.push_back(kmeans_objective(points, result.assignments, result.centroids));
    }
    return result;
}

}  // namespace dsrim
