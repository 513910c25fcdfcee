#include "syntab/analysis/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "syntab/neural/kernels.hpp"
#include "syntab/rng.hpp"

namespace syntab::analysis {

namespace {

std::vector<double> matvec(const Matrix& m, const std::vector<double>& v) {
    std::vector<double> out(m.rows, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double* row = m.row_ptr(i);
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) s += row[j] * v[j];
        out[i] = s;
    }
    return out;
}

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void normalize(std::vector<double>& v) {
    const double n = norm(v);
    for (double& x : v) x /= n;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Power iteration on cov, optionally deflated against a previous
// eigenvector. Returns {eigenvalue, eigenvector}; eigenvalue 0 signals a
// (numerically) zero matrix in the searched subspace.
std::pair<double, std::vector<double>> power_iterate(const Matrix& cov,
                                                     const std::vector<double>* against) {
    const std::size_t d = cov.rows;
    std::vector<double> v(d);
    for (std::size_t j = 0; j < d; ++j) v[j] = 1.0 + 1e-3 * static_cast<double>(j);
    if (against) {
        const double c = dot(v, *against);
        for (std::size_t j = 0; j < d; ++j) v[j] -= c * (*against)[j];
    }
    if (norm(v) == 0.0) return {0.0, v};
    normalize(v);

    for (int iter = 0; iter < 10000; ++iter) {
        std::vector<double> w = matvec(cov, v);
        if (against) {
            const double c = dot(w, *against);
            for (std::size_t j = 0; j < d; ++j) w[j] -= c * (*against)[j];
        }
        const double wn = norm(w);
        if (wn == 0.0) return {0.0, v};
        for (double& x : w) x /= wn;
        double delta = 0.0;
        for (std::size_t j = 0; j < d; ++j) delta = std::max(delta, std::abs(w[j] - v[j]));
        v = std::move(w);
        if (delta < 1e-10) break;
    }
    const std::vector<double> cv = matvec(cov, v);
    const double lambda = dot(v, cv);
    return {std::max(lambda, 0.0), v};
}

void fix_sign(std::vector<double>& v) {
    std::size_t arg = 0;
    for (std::size_t j = 1; j < v.size(); ++j) {
        if (std::abs(v[j]) > std::abs(v[arg])) arg = j;
    }
    if (v[arg] < 0.0) {
        for (double& x : v) x = -x;
    }
}

double dist2(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double diff = a[j] - b[j];
        s += diff * diff;
    }
    return s;
}

}  // namespace

Projection2D pca_2d(const Matrix& features) {
    const std::size_t n = features.rows;
    const std::size_t d = features.cols;
    if (n < 2 || d < 2) throw std::invalid_argument("pca_2d: need at least 2 rows and 2 columns");

    Matrix centered(n, d);
    for (std::size_t j = 0; j < d; ++j) {
        double mu = 0.0;
        for (std::size_t i = 0; i < n; ++i) mu += features.at(i, j);
        mu /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) centered.at(i, j) = features.at(i, j) - mu;
    }

    Matrix cov = kernels::matmul_at(centered, centered);
    const double scale = 1.0 / static_cast<double>(n - 1);
    for (double& v : cov.data) v *= scale;

    auto [lambda1, v1] = power_iterate(cov, nullptr);
    if (lambda1 <= 1e-12) throw std::invalid_argument("pca_2d: zero-variance data");
    fix_sign(v1);

    auto [lambda2, v2] = power_iterate(cov, &v1);
    lambda2 = std::min(lambda2, lambda1);
    if (lambda2 <= 0.0 || norm(v2) == 0.0) {
        // Rank-1 data: any direction orthogonal to v1 carries zero variance.
        std::size_t arg = 0;
        for (std::size_t j = 1; j < d; ++j) {
            if (std::abs(v1[j]) < std::abs(v1[arg])) arg = j;
        }
        v2.assign(d, 0.0);
        v2[arg] = 1.0;
        const double c = dot(v2, v1);
        for (std::size_t j = 0; j < d; ++j) v2[j] -= c * v1[j];
        lambda2 = 0.0;
    }
    // One more orthogonalization pass keeps the pair clean even when the
    // deflated iteration drifted slightly.
    const double c12 = dot(v2, v1);
    for (std::size_t j = 0; j < d; ++j) v2[j] -= c12 * v1[j];
    normalize(v2);
    fix_sign(v2);

    Projection2D proj;
    proj.components = Matrix(2, d);
    for (std::size_t j = 0; j < d; ++j) {
        proj.components.at(0, j) = v1[j];
        proj.components.at(1, j) = v2[j];
    }
    proj.explained_variance = {lambda1, lambda2};
    proj.points = kernels::matmul_bt(centered, proj.components);
    return proj;
}

Clustering kmeans(const Matrix& points, std::size_t k, std::uint64_t seed) {
    const std::size_t n = points.rows;
    const std::size_t d = points.cols;
    if (k == 0 || k > n) {
        throw std::invalid_argument("kmeans: k must be in [1, n], got k=" + std::to_string(k) +
                                    ", n=" + std::to_string(n));
    }

    Rng rng(seed);
    Matrix centroids(k, d);
    {
        // k-means++ seeding
        const std::size_t first = rng.uniform_index(n);
        for (std::size_t j = 0; j < d; ++j) centroids.at(0, j) = points.at(first, j);
        std::vector<double> d2(n);
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = dist2(points.row_ptr(i), centroids.row_ptr(0), d);
        }
        for (std::size_t c = 1; c < k; ++c) {
            double total = 0.0;
            for (double v : d2) total += v;
            std::size_t pick;
            if (total == 0.0) {
                pick = rng.uniform_index(n);
            } else {
                const double u = rng.uniform() * total;
                double acc = 0.0;
                pick = n - 1;
                for (std::size_t i = 0; i < n; ++i) {
                    acc += d2[i];
                    if (u < acc) {
                        pick = i;
                        break;
                    }
                }
            }
            for (std::size_t j = 0; j < d; ++j) centroids.at(c, j) = points.at(pick, j);
            for (std::size_t i = 0; i < n; ++i) {
                d2[i] = std::min(d2[i], dist2(points.row_ptr(i), centroids.row_ptr(c), d));
            }
        }
    }

    std::vector<std::size_t> assignments(n, 0);
    std::vector<std::size_t> previous;
    double prev_objective = std::numeric_limits<double>::infinity();
    double objective = 0.0;

    for (int iter = 0; iter < 300; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            const double* p = points.row_ptr(i);
            std::size_t best = 0;
            double best_d = dist2(p, centroids.row_ptr(0), d);
            for (std::size_t c = 1; c < k; ++c) {
                const double dd = dist2(p, centroids.row_ptr(c), d);
                if (dd < best_d) {
                    best_d = dd;
                    best = c;
                }
            }
            assignments[i] = best;
        }

        // Re-seed emptied clusters on the point farthest from its assigned
        // centroid; placing the centroid on that point keeps the objective
        // falling.
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t a : assignments) ++sizes[a];
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] != 0) continue;
            double worst = -1.0;
            std::size_t worst_i = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (sizes[assignments[i]] <= 1) continue;
                const double dd = dist2(points.row_ptr(i), centroids.row_ptr(assignments[i]), d);
                if (dd > worst) {
                    worst = dd;
                    worst_i = i;
                }
            }
            --sizes[assignments[worst_i]];
            assignments[worst_i] = c;
            ++sizes[c];
            for (std::size_t j = 0; j < d; ++j) centroids.at(c, j) = points.at(worst_i, j);
        }

        objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            objective += dist2(points.row_ptr(i), centroids.row_ptr(assignments[i]), d);
        }
        if (objective > prev_objective + 1e-9) {
            throw std::logic_error("kmeans: objective increased during assignment");
        }
        prev_objective = objective;

        const bool stable = !previous.empty() && previous == assignments;
        previous = assignments;

        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t j = 0; j < d; ++j) centroids.at(c, j) = 0.0;
        }
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = assignments[i];
            ++counts[c];
            const double* p = points.row_ptr(i);
            for (std::size_t j = 0; j < d; ++j) centroids.at(c, j) += p[j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t j = 0; j < d; ++j) {
                centroids.at(c, j) /= static_cast<double>(counts[c]);
            }
        }

        objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            objective += dist2(points.row_ptr(i), centroids.row_ptr(assignments[i]), d);
        }
        if (objective > prev_objective + 1e-9) {
            throw std::logic_error("kmeans: objective increased during centroid update");
        }
        prev_objective = objective;

        if (stable) break;
    }

    Clustering result;
    result.k = k;
    result.assignments = std::move(assignments);
    result.centroids = std::move(centroids);
    result.inertia = objective;
    return result;
}

ChooseKResult choose_k(const Matrix& points, std::size_t k_min, std::size_t k_max,
                       std::uint64_t seed) {
    if (k_min == 0 || k_min > k_max) throw std::invalid_argument("choose_k: empty range");
    if (k_max > points.rows) {
        throw std::invalid_argument("choose_k: k_max exceeds point count");
    }

    ChooseKResult result;
    Rng base(seed);
    for (std::size_t k = k_min; k <= k_max; ++k) {
        result.inertias.push_back(kmeans(points, k, base.child(k).next_u64()).inertia);
    }
    result.k = k_max;
    for (std::size_t k = k_min; k < k_max; ++k) {
        const double here = result.inertias[k - k_min];
        const double next = result.inertias[k - k_min + 1];
        const double drop = here > 0.0 ? (here - next) / here : 0.0;
        if (drop < 0.15) {
            result.k = k;
            break;
        }
    }
    return result;
}

}  // namespace syntab::analysis
