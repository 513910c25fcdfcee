#include "syntab/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace syntab::eval {

ConfusionMatrix confusion(const std::vector<int>& truth, const std::vector<int>& predicted) {
    if (truth.size() != predicted.size()) {
        throw std::invalid_argument("confusion: truth and prediction lengths differ");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if ((truth[i] != 0 && truth[i] != 1) || (predicted[i] != 0 && predicted[i] != 1)) {
            throw std::invalid_argument("confusion: labels must be 0 or 1");
        }
        if (truth[i] == 1) {
            predicted[i] == 1 ? ++cm.tp : ++cm.fn;
        } else {
            predicted[i] == 1 ? ++cm.fp : ++cm.tn;
        }
    }
    return cm;
}

UtilityMetrics utility_from_confusion(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw std::invalid_argument("utility_from_confusion: empty matrix");
    UtilityMetrics m;
    m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    if (cm.tp + cm.fp == 0) {
        m.degenerate = true;
    } else {
        m.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    }
    if (cm.tp + cm.fn == 0) {
        m.degenerate = true;
    } else {
        m.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    }
    if (m.precision + m.recall == 0.0) {
        m.degenerate = true;
    } else {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
    return m;
}

RocResult roc_auc(const std::vector<int>& truth, const std::vector<double>& scores) {
    if (truth.size() != scores.size()) {
        throw std::invalid_argument("roc_auc: truth and score lengths differ");
    }
    std::size_t n_pos = 0;
    for (int t : truth) {
        if (t != 0 && t != 1) throw std::invalid_argument("roc_auc: labels must be 0 or 1");
        n_pos += static_cast<std::size_t>(t);
    }
    const std::size_t n = truth.size();
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw std::invalid_argument("roc_auc: both classes must be present");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Average ranks over tie groups, accumulating the positive-class rank sum.
    double rank_sum_pos = 0.0;
    {
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j < n && scores[order[j]] == scores[order[i]]) ++j;
            const double avg_rank = static_cast<double>(i + 1 + j) / 2.0;  // ranks i+1 .. j
            for (std::size_t t = i; t < j; ++t) {
                if (truth[order[t]] == 1) rank_sum_pos += avg_rank;
            }
            i = j;
        }
    }
    RocResult result;
    result.auc = (rank_sum_pos - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0) /
                 (static_cast<double>(n_pos) * static_cast<double>(n_neg));

    // Curve: thresholds at each distinct score, descending, predicting
    // positive at score >= threshold. Leading (0,0) anchors the sweep.
    result.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    std::size_t tp = 0;
    std::size_t fp = 0;
    for (std::size_t i = n; i > 0;) {
        std::size_t j = i;
        const double s = scores[order[i - 1]];
        while (j > 0 && scores[order[j - 1]] == s) {
            if (truth[order[j - 1]] == 1) ++tp;
            else ++fp;
            --j;
        }
        result.points.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                                 static_cast<double>(tp) / static_cast<double>(n_pos), s});
        i = j;
    }
    return result;
}

double cosine_similarity(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("cosine_similarity: lengths differ");
    if (x.empty()) throw std::invalid_argument("cosine_similarity: empty vectors");
    double dot = 0.0, nx = 0.0, ny = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * y[i];
        nx += x[i] * x[i];
        ny += y[i] * y[i];
    }
    if (nx == 0.0 || ny == 0.0) {
        throw std::invalid_argument("cosine_similarity: zero vector has no direction");
    }
    return dot / (std::sqrt(nx) * std::sqrt(ny));
}

namespace {

std::vector<double> column_means(const Matrix& block) {
    if (block.rows == 0) throw std::invalid_argument("column_means: empty block");
    std::vector<double> mu(block.cols, 0.0);
    for (std::size_t i = 0; i < block.rows; ++i) {
        const double* row = block.row_ptr(i);
        for (std::size_t j = 0; j < block.cols; ++j) mu[j] += row[j];
    }
    for (double& v : mu) v /= static_cast<double>(block.rows);
    return mu;
}

}  // namespace

double squared_euclidean_of_means(const Matrix& real_block, const Matrix& synth_block) {
    if (real_block.cols != synth_block.cols) {
        throw std::invalid_argument("squared_euclidean_of_means: column counts differ");
    }
    const std::vector<double> mr = column_means(real_block);
    const std::vector<double> ms = column_means(synth_block);
    double s = 0.0;
    for (std::size_t j = 0; j < mr.size(); ++j) {
        const double d = mr[j] - ms[j];
        s += d * d;
    }
    return s;
}

double mean_squared_error(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("mean_squared_error: lengths differ");
    if (x.empty()) throw std::invalid_argument("mean_squared_error: empty vectors");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s / static_cast<double>(x.size());
}

std::vector<double> class_mean(const tabular::LabeledDataset& ds, int label) {
    std::vector<double> mu(ds.cols(), 0.0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        if (ds.labels[i] != label) continue;
        ++count;
        const double* row = ds.features.row_ptr(i);
        for (std::size_t j = 0; j < ds.cols(); ++j) mu[j] += row[j];
    }
    if (count == 0) {
        throw std::invalid_argument("class_mean: class " + std::to_string(label) + " absent");
    }
    for (double& v : mu) v /= static_cast<double>(count);
    return mu;
}

std::vector<FidelityMetrics> fidelity_report(const tabular::LabeledDataset& real,
                                             const tabular::LabeledDataset& synth) {
    if (real.cols() != synth.cols()) {
        throw std::invalid_argument("fidelity_report: feature counts differ");
    }
    std::vector<FidelityMetrics> out;
    for (int cls = 0; cls < 2; ++cls) {
        const std::vector<double> mr = class_mean(real, cls);
        const std::vector<double> ms = class_mean(synth, cls);
        FidelityMetrics f;
        f.class_label = cls;
        f.cosine = cosine_similarity(mr, ms);
        f.mse = mean_squared_error(mr, ms);
        f.euclidean_sq = f.mse * static_cast<double>(mr.size());
        out.push_back(f);
    }
    return out;
}

}  // namespace syntab::eval
