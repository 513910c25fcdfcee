#pragma once

#include <string>
#include <vector>

#include "syntab/bench/bench.hpp"
#include "syntab/matrix.hpp"

namespace syntab::cli {

// One row per (classifier, protocol) pair, one column per metric. Cells use
// a 10-step sequential blue ramp (darker = higher) and carry the mean to
// two decimals. Throws on an empty aggregate list.
std::string utility_heatmap_svg(const std::vector<bench::AggregateEntry>& aggregates);

// 2-D scatter of PCA-projected points colored by cluster assignment, with
// PC1/PC2 axis labels and a legend listing each cluster's size.
std::string cluster_scatter_svg(const Matrix& points,
                                const std::vector<std::size_t>& assignments, std::size_t k);

}  // namespace syntab::cli
