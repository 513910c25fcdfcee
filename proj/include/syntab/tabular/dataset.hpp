#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "syntab/matrix.hpp"

namespace syntab::tabular {

enum class Origin { Real, Synthetic };

// Row-major feature table plus binary labels (1 = positive/malware).
// Feature values land in [0,1] once min_max_normalize has run; raw loads may
// carry arbitrary numeric ranges.
struct LabeledDataset {
    Matrix features;
    std::vector<int> labels;
    std::vector<std::string> feature_names;
    Origin origin = Origin::Real;

    std::size_t rows() const { return features.rows; }
    std::size_t cols() const { return features.cols; }
};

struct FoldPlan {
    std::size_t k = 0;
    std::vector<std::size_t> assignments;
    std::uint64_t seed = 0;
};

struct BalanceReport {
    std::size_t kept_per_class = 0;
    std::vector<std::size_t> dropped_indices;
    std::uint64_t seed = 0;
};

struct FeatureBounds {
    double min = 0.0;
    double max = 0.0;
};

// CSV: UTF-8, comma-separated, header row, no quoting. Every non-label cell
// must parse as a number; failures name the file line and column. Label cells
// equal to positive_label map to 1, everything else to 0.
LabeledDataset load_csv(const std::string& path, const std::string& label_column = "class",
                        const std::string& positive_label = "1");

// Maps each column by (v - min) / (max - min). Without supplied bounds the
// per-column min/max of ds are used and returned; with supplied bounds
// (e.g. an evaluation fold reusing its training fold's bounds) results are
// clamped into [0,1]. Columns with min == max map to 0.
std::pair<LabeledDataset, std::vector<FeatureBounds>> min_max_normalize(
    const LabeledDataset& ds, const std::optional<std::vector<FeatureBounds>>& bounds = {});

// Drops uniformly chosen majority-class rows until the classes match; row
// order among survivors is preserved. dropped_indices refer to the input.
std::pair<LabeledDataset, BalanceReport> balance_by_undersampling(const LabeledDataset& ds,
                                                                  std::uint64_t seed);

// Stratified assignment: within each class the per-fold counts differ by at
// most 1, and total fold sizes differ by at most 1 (the two classes'
// remainder folds are staggered so the extras never pile up).
FoldPlan stratified_kfold(const LabeledDataset& ds, std::size_t k, std::uint64_t seed);

// Scores each feature by the chi-square statistic of the 2x2 table
// (feature >= 0.5) x label and keeps the top_m columns. The returned index
// list is in rank order (highest statistic first, ties to the lower column
// index) and the output dataset's columns follow it.
std::pair<LabeledDataset, std::vector<std::size_t>> chi_square_select(const LabeledDataset& ds,
                                                                      std::size_t top_m);

LabeledDataset take_rows(const LabeledDataset& ds, const std::vector<std::size_t>& indices);

// counts[0] = benign rows, counts[1] = malware rows.
std::array<std::size_t, 2> class_counts(const LabeledDataset& ds);

std::string fold_plan_to_json(const FoldPlan& plan);
std::string balance_report_to_json(const BalanceReport& report);

}  // namespace syntab::tabular
