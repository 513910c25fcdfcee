#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "syntab/analysis/analysis.hpp"
#include "syntab/rng.hpp"

using namespace syntab;
using namespace syntab::analysis;

namespace {

Matrix sample_covariance(const Matrix& x) {
    const std::size_t n = x.rows;
    const std::size_t d = x.cols;
    std::vector<double> mu(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) mu[j] += x.at(i, j);
    }
    for (double& v : mu) v /= static_cast<double>(n);
    Matrix cov(d, d);
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                s += (x.at(i, a) - mu[a]) * (x.at(i, b) - mu[b]);
            }
            cov.at(a, b) = s / static_cast<double>(n - 1);
        }
    }
    return cov;
}

// Jacobi rotations on a small symmetric matrix; returns the eigenvalues in
// descending order. Deliberately naive so it shares nothing with the
// production power iteration.
std::vector<double> jacobi_eigenvalues(Matrix m) {
    const std::size_t d = m.rows;
    for (int sweep = 0; sweep < 200; ++sweep) {
        std::size_t p = 0, q = 1;
        double big = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = i + 1; j < d; ++j) {
                if (std::abs(m.at(i, j)) > big) {
                    big = std::abs(m.at(i, j));
                    p = i;
                    q = j;
                }
            }
        }
        if (big < 1e-14) break;
        const double theta =
            0.5 * std::atan2(2.0 * m.at(p, q), m.at(q, q) - m.at(p, p));
        const double c = std::cos(theta), s = std::sin(theta);
        Matrix rot(d, d);
        for (std::size_t i = 0; i < d; ++i) rot.at(i, i) = 1.0;
        rot.at(p, p) = c;
        rot.at(q, q) = c;
        rot.at(p, q) = s;
        rot.at(q, p) = -s;
        Matrix tmp(d, d), next(d, d);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                double acc = 0.0;
                for (std::size_t t = 0; t < d; ++t) acc += rot.at(t, i) * m.at(t, j);
                tmp.at(i, j) = acc;
            }
        }
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                double acc = 0.0;
                for (std::size_t t = 0; t < d; ++t) acc += tmp.at(i, t) * rot.at(t, j);
                next.at(i, j) = acc;
            }
        }
        m = next;
    }
    std::vector<double> eig(d);
    for (std::size_t i = 0; i < d; ++i) eig[i] = m.at(i, i);
    std::sort(eig.rbegin(), eig.rend());
    return eig;
}

double comb2(double x) { return x * (x - 1.0) / 2.0; }

double adjusted_rand_index(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    const std::size_t n = a.size();
    const std::size_t ka = 1 + *std::max_element(a.begin(), a.end());
    const std::size_t kb = 1 + *std::max_element(b.begin(), b.end());
    std::vector<std::vector<double>> table(ka, std::vector<double>(kb, 0.0));
    for (std::size_t i = 0; i < n; ++i) table[a[i]][b[i]] += 1.0;

    double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
    for (std::size_t i = 0; i < ka; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < kb; ++j) {
            sum_cells += comb2(table[i][j]);
            row += table[i][j];
        }
        sum_rows += comb2(row);
    }
    for (std::size_t j = 0; j < kb; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < ka; ++i) col += table[i][j];
        sum_cols += comb2(col);
    }
    const double expected = sum_rows * sum_cols / comb2(static_cast<double>(n));
    const double maximum = (sum_rows + sum_cols) / 2.0;
    return (sum_cells - expected) / (maximum - expected);
}

// Three tight Gaussian blobs far apart; labels 0/1/2 in round-robin order.
std::pair<Matrix, std::vector<std::size_t>> planted_blobs(std::size_t per_cluster,
                                                          std::uint64_t seed) {
    const double centers[3][2] = {{0.0, 0.0}, {6.0, 0.0}, {0.0, 6.0}};
    Rng rng(seed);
    Matrix points(3 * per_cluster, 2);
    std::vector<std::size_t> labels(3 * per_cluster);
    for (std::size_t i = 0; i < 3 * per_cluster; ++i) {
        const std::size_t c = i % 3;
        points.at(i, 0) = centers[c][0] + rng.normal(0.2);
        points.at(i, 1) = centers[c][1] + rng.normal(0.2);
        labels[i] = c;
    }
    return {std::move(points), std::move(labels)};
}

Matrix random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(n, d);
    for (double& v : m.data) v = rng.uniform() * 4.0 - 2.0;
    return m;
}

}  // namespace

TEST_CASE("pca_2d matches the closed-form 2x2 eigenvalues") {
    const Matrix x = random_points(60, 2, 101);
    const Projection2D proj = pca_2d(x);

    const Matrix cov = sample_covariance(x);
    const double a = cov.at(0, 0), b = cov.at(0, 1), c = cov.at(1, 1);
    const double mid = (a + c) / 2.0;
    const double radius = std::sqrt((a - c) * (a - c) / 4.0 + b * b);
    CHECK(proj.explained_variance[0] == doctest::Approx(mid + radius).epsilon(1e-10));
    CHECK(proj.explained_variance[1] == doctest::Approx(mid - radius).epsilon(1e-10));
}

TEST_CASE("pca_2d agrees with a Jacobi oracle in higher dimensions") {
    for (std::uint64_t seed : {7ULL, 8ULL, 9ULL}) {
        const Matrix x = random_points(80, 5, seed);
        const Projection2D proj = pca_2d(x);
        const Matrix cov = sample_covariance(x);
        const std::vector<double> eig = jacobi_eigenvalues(cov);
        CHECK(std::abs(proj.explained_variance[0] - eig[0]) < 1e-8);
        CHECK(std::abs(proj.explained_variance[1] - eig[1]) < 1e-8);

        // Both components are unit, orthogonal eigenvectors: C v = lambda v.
        for (int comp = 0; comp < 2; ++comp) {
            double norm2 = 0.0;
            for (std::size_t j = 0; j < 5; ++j) {
                norm2 += proj.components.at(static_cast<std::size_t>(comp), j) *
                         proj.components.at(static_cast<std::size_t>(comp), j);
            }
            CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-10));
            for (std::size_t r = 0; r < 5; ++r) {
                double cv = 0.0;
                for (std::size_t j = 0; j < 5; ++j) {
                    cv += cov.at(r, j) * proj.components.at(static_cast<std::size_t>(comp), j);
                }
                CHECK(cv == doctest::Approx(proj.explained_variance[static_cast<std::size_t>(comp)] *
                                            proj.components.at(static_cast<std::size_t>(comp), r))
                                .epsilon(1e-6)
                                .scale(1.0));
            }
        }
        double dot = 0.0;
        for (std::size_t j = 0; j < 5; ++j) {
            dot += proj.components.at(0, j) * proj.components.at(1, j);
        }
        CHECK(std::abs(dot) < 1e-8);
    }
}

TEST_CASE("pca_2d projects onto the components and fixes signs") {
    const Matrix x = random_points(50, 3, 77);
    const Projection2D proj = pca_2d(x);
    REQUIRE(proj.points.rows == 50);
    REQUIRE(proj.points.cols == 2);
    REQUIRE(proj.components.rows == 2);
    REQUIRE(proj.components.cols == 3);

    std::vector<double> mu(3, 0.0);
    for (std::size_t i = 0; i < 50; ++i) {
        for (std::size_t j = 0; j < 3; ++j) mu[j] += x.at(i, j);
    }
    for (double& v : mu) v /= 50.0;
    for (std::size_t i = 0; i < 50; ++i) {
        for (std::size_t comp = 0; comp < 2; ++comp) {
            double expect = 0.0;
            for (std::size_t j = 0; j < 3; ++j) {
                expect += (x.at(i, j) - mu[j]) * proj.components.at(comp, j);
            }
            CHECK(proj.points.at(i, comp) == doctest::Approx(expect).epsilon(1e-10));
        }
    }

    // Score variance along each axis is the matching eigenvalue.
    for (std::size_t comp = 0; comp < 2; ++comp) {
        double var = 0.0;
        for (std::size_t i = 0; i < 50; ++i) var += proj.points.at(i, comp) * proj.points.at(i, comp);
        var /= 49.0;
        CHECK(var == doctest::Approx(proj.explained_variance[comp]).epsilon(1e-8));
    }

    // Largest-magnitude entry of each component is positive.
    for (std::size_t comp = 0; comp < 2; ++comp) {
        std::size_t arg = 0;
        for (std::size_t j = 1; j < 3; ++j) {
            if (std::abs(proj.components.at(comp, j)) > std::abs(proj.components.at(comp, arg))) {
                arg = j;
            }
        }
        CHECK(proj.components.at(comp, arg) > 0.0);
    }
}

TEST_CASE("pca_2d handles rank-1 data and rejects degenerate input") {
    // Points on a 3-D line: all variance sits on one component.
    Matrix line(40, 3);
    for (std::size_t i = 0; i < 40; ++i) {
        const double t = static_cast<double>(i) / 39.0;
        line.at(i, 0) = 1.0 * t;
        line.at(i, 1) = 2.0 * t;
        line.at(i, 2) = -2.0 * t;
    }
    const Projection2D proj = pca_2d(line);
    CHECK(proj.explained_variance[0] > 0.0);
    CHECK(proj.explained_variance[1] == 0.0);
    double dot = 0.0, norm2 = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
        dot += proj.components.at(0, j) * proj.components.at(1, j);
        norm2 += proj.components.at(1, j) * proj.components.at(1, j);
    }
    CHECK(std::abs(dot) < 1e-10);
    CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-10));

    Matrix flat(10, 2);
    for (double& v : flat.data) v = 3.5;
    CHECK_THROWS_AS((void)pca_2d(flat), std::invalid_argument);
    CHECK_THROWS_AS((void)pca_2d(Matrix(1, 4)), std::invalid_argument);
    CHECK_THROWS_AS((void)pca_2d(Matrix(4, 1)), std::invalid_argument);
}

TEST_CASE("kmeans recovers planted clusters") {
    const auto [points, labels] = planted_blobs(60, 5);
    const Clustering result = kmeans(points, 3, 13);
    CHECK(result.k == 3);
    REQUIRE(result.assignments.size() == points.rows);
    CHECK(adjusted_rand_index(labels, result.assignments) >= 0.99);

    // Inertia is the sum of squared distances to the assigned centroids.
    double inertia = 0.0;
    for (std::size_t i = 0; i < points.rows; ++i) {
        const std::size_t c = result.assignments[i];
        for (std::size_t j = 0; j < 2; ++j) {
            const double d = points.at(i, j) - result.centroids.at(c, j);
            inertia += d * d;
        }
    }
    CHECK(inertia == doctest::Approx(result.inertia).epsilon(1e-9));

    // Converged: no point is strictly closer to a foreign centroid.
    for (std::size_t i = 0; i < points.rows; ++i) {
        double own = 0.0;
        for (std::size_t j = 0; j < 2; ++j) {
            const double d = points.at(i, j) - result.centroids.at(result.assignments[i], j);
            own += d * d;
        }
        for (std::size_t c = 0; c < 3; ++c) {
            double other = 0.0;
            for (std::size_t j = 0; j < 2; ++j) {
                const double d = points.at(i, j) - result.centroids.at(c, j);
                other += d * d;
            }
            CHECK(own <= other + 1e-9);
        }
    }

    // Deterministic per seed.
    const Clustering again = kmeans(points, 3, 13);
    CHECK(again.assignments == result.assignments);
    CHECK(again.inertia == result.inertia);
}

TEST_CASE("kmeans edge cases") {
    const auto [points, labels] = planted_blobs(10, 99);
    (void)labels;

    // k=1: centroid is the global mean, inertia the total scatter.
    const Clustering one = kmeans(points, 1, 0);
    std::vector<double> mu(2, 0.0);
    for (std::size_t i = 0; i < points.rows; ++i) {
        mu[0] += points.at(i, 0);
        mu[1] += points.at(i, 1);
    }
    mu[0] /= static_cast<double>(points.rows);
    mu[1] /= static_cast<double>(points.rows);
    CHECK(one.centroids.at(0, 0) == doctest::Approx(mu[0]).epsilon(1e-12));
    CHECK(one.centroids.at(0, 1) == doctest::Approx(mu[1]).epsilon(1e-12));
    double scatter = 0.0;
    for (std::size_t i = 0; i < points.rows; ++i) {
        const double dx = points.at(i, 0) - mu[0];
        const double dy = points.at(i, 1) - mu[1];
        scatter += dx * dx + dy * dy;
    }
    CHECK(one.inertia == doctest::Approx(scatter).epsilon(1e-9));

    // k=n: every point is its own centroid.
    const Clustering all = kmeans(points, points.rows, 1);
    CHECK(all.inertia == doctest::Approx(0.0));

    // All-identical points survive the degenerate seeding path.
    Matrix same(6, 2);
    for (double& v : same.data) v = 2.0;
    const Clustering degenerate = kmeans(same, 2, 5);
    CHECK(degenerate.inertia == doctest::Approx(0.0));

    CHECK_THROWS_AS((void)kmeans(points, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)kmeans(points, points.rows + 1, 0), std::invalid_argument);
}

TEST_CASE("choose_k finds the planted elbow") {
    const auto [points, labels] = planted_blobs(50, 21);
    (void)labels;
    const ChooseKResult result = choose_k(points, 1, 8, 77);
    CHECK(result.k == 3);
    REQUIRE(result.inertias.size() == 8);
    // Well past the elbow the curve is nearly flat.
    CHECK(result.inertias[3] > 0.0);
    CHECK(result.inertias[0] > result.inertias[2]);

    CHECK_THROWS_AS((void)choose_k(points, 0, 4, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)choose_k(points, 5, 4, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)choose_k(points, 1, points.rows + 1, 0), std::invalid_argument);
}
