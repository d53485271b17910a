#include <set>

#include "doctest.h"

#include "dsrim/error.hpp"
#include "dsrim/kmeans.hpp"
#include "dsrim/random.hpp"

using namespace dsrim;

namespace {

std::vector<Vector> blobs(Rng& rng, std::size_t per_blob, double separation)
{
    std::vector<Vector> points;
    for (std::size_t i = 0; i < 2 * per_blob; ++i) {
        const double c = i < per_blob ? 0.0 : separation;
        points.push_back({c + rng.uniform(-1, 1), c + rng.uniform(-1, 1)});
    }
    return points;
}

}  // namespace

TEST_CASE("k points and k clusters give an exact cover")
{
    const std::vector<Vector> points{{0, 0}, {5, 1}, {-3, 7}, {2, 2}};
    const auto r = kmeans(points, 4, 50, 1);
    CHECK(std::set<std::size_t>(r.assignments.begin(), r.assignments.end()).size() == 4);
    CHECK(kmeans_objective(points, r.assignments, r.centroids) == 0.0);
}

TEST_CASE("two separated blobs are recovered")
{
    Rng rng(12);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto points = blobs(rng, 15, 20.0);
        const auto r = kmeans(points, 2, 100, seed);
        for (std::size_t i = 0; i < points.size(); ++i) {
            CHECK((r.assignments[i] == r.assignments[0]) == (i < 15));
        }
        CHECK(r.converged);
    }
}

TEST_CASE("objective never increases and runs are reproducible")
{
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 5 + rng.below(50);
        const std::size_t d = 1 + rng.below(4);
        std::vector<Vector> points(n, Vector(d));
        for (auto& p : points) {
            for (auto& x : p) {
                x = rng.uniform(-5, 5);
            }
        }
        const std::size_t k = 1 + rng.below(std::min<std::size_t>(n, 6));
        const auto r = kmeans(points, k, 100, trial);
        for (std::size_t i = 1; i < r.objective_history.size(); ++i) {
            CHECK(r.objective_history[i] <= r.objective_history[i - 1] * (1.0 + 1e-12));
        }
        CHECK(kmeans(points, k, 100, trial).assignments == r.assignments);
    }
}

TEST_CASE("k larger than the number of distinct points is rejected")
{
    const std::vector<Vector> points{{1, 1}, {1, 1}, {2, 2}};
    CHECK_THROWS_AS(kmeans(points, 3, 10, 1), ConfigError);
    CHECK_NOTHROW(kmeans(points, 2, 10, 1));
}
