#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dsrim/embeddings.hpp"

namespace dsrim {

struct KMeansResult {
    std::vector<std::size_t> assignments;
    std::vector<Vector> centroids;
    /// Within-cluster sum of squares after each Lloyd iteration.
    std::vector<double> objective_history;
    std::size_t iterations = 0;
    bool converged = false;
};

double squared_distance(const Vector& a, const Vector& b);

/// Within-cluster sum of squares of an assignment against given centroids.
double kmeans_objective(const std::vector<Vector>& points, const std::vector<std::size_t>& assignments,
                        const std::vector<Vector>& centroids);

/// Lloyd's algorithm with k-means++ seeding. Stops at an assignment fixpoint or
/// after `max_iter` iterations. Nearest-centroid ties go to the lowest index.
/// A cluster left empty is re-seeded at the point farthest from its centroid
/// (lowest index on ties), taken from a cluster with at least two members.
/// Raises ConfigError when k is zero or exceeds the number of distinct points.
KMeansResult kmeans(const std::vector<Vector>& points, std::size_t k, std::size_t max_iter, std::uint64_t seed);

}  // namespace dsrim
