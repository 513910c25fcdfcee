#pragma once

#include <cstddef>
#include <vector>

#include "syntab/matrix.hpp"
#include "syntab/tabular/dataset.hpp"

namespace syntab::eval {

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
};

// Metrics with a zero denominator come back as 0 with `degenerate` set,
// never as NaN.
struct UtilityMetrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double auc = 0.0;
    bool degenerate = false;
};

// Class 1 (malware) is the positive class throughout.
ConfusionMatrix confusion(const std::vector<int>& truth, const std::vector<int>& predicted);

// Fills accuracy/precision/recall/f1; auc is left 0 (it needs scores, see
// roc_auc).
UtilityMetrics utility_from_confusion(const ConfusionMatrix& cm);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;
};

struct RocResult {
    double auc = 0.0;
    std::vector<RocPoint> points;
};

// Rank-based AUC with average ranks for tied scores; equal to the
// trapezoidal area under the curve emitted alongside (one point per
// distinct score, predicting positive at score >= threshold).
RocResult roc_auc(const std::vector<int>& truth, const std::vector<double>& scores);

// Errors on a zero vector: the value is genuinely undefined there and
// silently returning 0 would fake orthogonality.
double cosine_similarity(const std::vector<double>& x, const std::vector<double>& y);

double squared_euclidean_of_means(const Matrix& real_block, const Matrix& synth_block);

double mean_squared_error(const std::vector<double>& x, const std::vector<double>& y);

struct FidelityMetrics {
    double cosine = 0.0;
    double euclidean_sq = 0.0;
    double mse = 0.0;
    int class_label = 0;
};

// Per class (0 then 1): all three metrics compared between the per-feature
// mean vectors of the real and synthetic class blocks. Both classes must be
// present in both datasets.
std::vector<FidelityMetrics> fidelity_report(const tabular::LabeledDataset& real,
                                             const tabular::LabeledDataset& synth);

// Per-feature means of the rows with the given label.
std::vector<double> class_mean(const tabular::LabeledDataset& ds, int label);

}  // namespace syntab::eval
