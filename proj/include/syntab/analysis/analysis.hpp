#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "syntab/matrix.hpp"

namespace syntab::analysis {

struct Projection2D {
    Matrix points;                               // n x 2
    Matrix components;                           // 2 x d, rows orthonormal
    std::array<double, 2> explained_variance{};  // descending
};

// Mean-centers the data and extracts the top two eigenpairs of the sample
// covariance matrix by deflated power iteration (tolerance 1e-10, at most
// 10,000 iterations). Sign convention: the largest-magnitude entry of each
// component is positive. Errors on zero-variance data.
Projection2D pca_2d(const Matrix& features);

struct Clustering {
    std::size_t k = 0;
    std::vector<std::size_t> assignments;
    Matrix centroids;  // k x d
    double inertia = 0.0;
};

// k-means++ seeding followed by Lloyd iterations until the assignments stop
// changing or 300 rounds pass. An emptied cluster is re-seeded to the point
// farthest from its current centroid. Inertia is checked to be
// non-increasing every iteration.
Clustering kmeans(const Matrix& points, std::size_t k, std::uint64_t seed);

struct ChooseKResult {
    std::size_t k = 0;
    std::vector<double> inertias;  // one per candidate k, in range order
};

// Elbow rule: the smallest k in [k_min, k_max] whose relative inertia drop
// to k+1 falls below 0.15; k_max when none does.
ChooseKResult choose_k(const Matrix& points, std::size_t k_min, std::size_t k_max,
                       std::uint64_t seed);

}  // namespace syntab::analysis
