#include "syntab/classifiers/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "syntab/rng.hpp"

namespace syntab::classifiers {

namespace {

void require_both_classes(const tabular::LabeledDataset& ds, const char* what) {
    const auto counts = tabular::class_counts(ds);
    if (counts[0] == 0 || counts[1] == 0) {
        throw std::invalid_argument(std::string(what) + ": both classes must be present");
    }
}

double tree_score(const std::vector<TreeNode>& nodes, const double* row) {
    int idx = 0;
    while (!(nodes[static_cast<std::size_t>(idx)].feature < 0)) {
        const TreeNode& node = nodes[static_cast<std::size_t>(idx)];
        idx = row[node.feature] < node.threshold ? node.left : node.right;
    }
    return nodes[static_cast<std::size_t>(idx)].value;
}

double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// ---- CART ------------------------------------------------------------

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double score = 0.0;  // gain (classification) or SSE reduction (regression)
};

double gini(std::size_t pos, std::size_t total) {
    if (total == 0) return 0.0;
    const double p = static_cast<double>(pos) / static_cast<double>(total);
    return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

// Best Gini split over the given rows. Ties resolve to the lower feature
// index then the lower threshold because features and thresholds are
// scanned in ascending order and only strict improvements replace the
// incumbent.
SplitChoice best_gini_split(const Matrix& x, const std::vector<int>& y,
                            const std::vector<std::size_t>& rows, std::size_t min_leaf) {
    SplitChoice best;
    const std::size_t n = rows.size();
    std::size_t node_pos = 0;
    for (std::size_t r : rows) node_pos += static_cast<std::size_t>(y[r]);
    const double node_gini = gini(node_pos, n);

    std::vector<std::pair<double, int>> column(n);
    for (std::size_t j = 0; j < x.cols; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            column[i] = {x.at(rows[i], j), y[rows[i]]};
        }
        std::sort(column.begin(), column.end());

        std::size_t left_n = 0;
        std::size_t left_pos = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            left_n += 1;
            left_pos += static_cast<std::size_t>(column[i].second);
            if (column[i].first == column[i + 1].first) continue;
            if (left_n < min_leaf || n - left_n < min_leaf) continue;
            const double gain =
                node_gini - (static_cast<double>(left_n) * gini(left_pos, left_n) +
                             static_cast<double>(n - left_n) * gini(node_pos - left_pos, n - left_n)) /
                                static_cast<double>(n);
            if (!best.found || gain > best.score) {
                best.found = true;
                best.feature = static_cast<int>(j);
                best.threshold = (column[i].first + column[i + 1].first) / 2.0;
                best.score = gain;
            }
        }
    }
    return best;
}

int grow_gini_tree(const Matrix& x, const std::vector<int>& y, std::vector<std::size_t>&& rows,
                   std::size_t depth, const TreeParams& params, std::vector<TreeNode>& nodes) {
    const std::size_t n = rows.size();
    std::size_t pos = 0;
    for (std::size_t r : rows) pos += static_cast<std::size_t>(y[r]);

    const int idx = static_cast<int>(nodes.size());
    nodes.push_back({});
    nodes[static_cast<std::size_t>(idx)].value = static_cast<double>(pos) / static_cast<double>(n);

    const bool pure = pos == 0 || pos == n;
    if (pure || depth >= params.max_depth || n < 2 * params.min_leaf) return idx;

    const SplitChoice split = best_gini_split(x, y, rows, params.min_leaf);
    if (!split.found) return idx;

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows) {
        (x.at(r, static_cast<std::size_t>(split.feature)) < split.threshold ? left_rows : right_rows)
            .push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    nodes[static_cast<std::size_t>(idx)].feature = split.feature;
    nodes[static_cast<std::size_t>(idx)].threshold = split.threshold;
    const int left = grow_gini_tree(x, y, std::move(left_rows), depth + 1, params, nodes);
    nodes[static_cast<std::size_t>(idx)].left = left;
    const int right = grow_gini_tree(x, y, std::move(right_rows), depth + 1, params, nodes);
    nodes[static_cast<std::size_t>(idx)].right = right;
    return idx;
}

// ---- regression tree for boosting -------------------------------------

SplitChoice best_sse_split(const Matrix& x, const std::vector<double>& target,
                           const std::vector<std::size_t>& rows) {
    SplitChoice best;
    const std::size_t n = rows.size();
    double node_sum = 0.0;
    for (std::size_t r : rows) node_sum += target[r];

    std::vector<std::pair<double, double>> column(n);
    for (std::size_t j = 0; j < x.cols; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            column[i] = {x.at(rows[i], j), target[rows[i]]};
        }
        std::sort(column.begin(), column.end());

        double left_sum = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            left_sum += column[i].second;
            if (column[i].first == column[i + 1].first) continue;
            const double ln = static_cast<double>(i + 1);
            const double rn = static_cast<double>(n - i - 1);
            // SSE reduction up to the node-constant term:
            //   sum_l^2/n_l + sum_r^2/n_r - sum^2/n
            const double right_sum = node_sum - left_sum;
            const double reduction = left_sum * left_sum / ln + right_sum * right_sum / rn -
                                     node_sum * node_sum / static_cast<double>(n);
            if (reduction > 1e-12 && (!best.found || reduction > best.score)) {
                best.found = true;
                best.feature = static_cast<int>(j);
                best.threshold = (column[i].first + column[i + 1].first) / 2.0;
                best.score = reduction;
            }
        }
    }
    return best;
}

int grow_sse_tree(const Matrix& x, const std::vector<double>& residual,
                  const std::vector<double>& hessian, std::vector<std::size_t>&& rows,
                  std::size_t depth, std::size_t max_depth, std::vector<TreeNode>& nodes) {
    const int idx = static_cast<int>(nodes.size());
    nodes.push_back({});
    double sum_r = 0.0;
    double sum_h = 0.0;
    for (std::size_t r : rows) {
        sum_r += residual[r];
        sum_h += hessian[r];
    }
    nodes[static_cast<std::size_t>(idx)].value =
        std::clamp(sum_r / std::max(sum_h, 1e-12), -4.0, 4.0);

    if (depth >= max_depth || rows.size() < 2) return idx;
    const SplitChoice split = best_sse_split(x, residual, rows);
    if (!split.found) return idx;

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows) {
        (x.at(r, static_cast<std::size_t>(split.feature)) < split.threshold ? left_rows : right_rows)
            .push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    nodes[static_cast<std::size_t>(idx)].feature = split.feature;
    nodes[static_cast<std::size_t>(idx)].threshold = split.threshold;
    const int left =
        grow_sse_tree(x, residual, hessian, std::move(left_rows), depth + 1, max_depth, nodes);
    nodes[static_cast<std::size_t>(idx)].left = left;
    const int right =
        grow_sse_tree(x, residual, hessian, std::move(right_rows), depth + 1, max_depth, nodes);
    nodes[static_cast<std::size_t>(idx)].right = right;
    return idx;
}

double log_loss(const std::vector<double>& score, const std::vector<int>& y) {
    double total = 0.0;
    for (std::size_t i = 0; i < score.size(); ++i) {
        const double p = std::clamp(stable_sigmoid(score[i]), 1e-12, 1.0 - 1e-12);
        total += y[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
    }
    return total / static_cast<double>(score.size());
}

nlohmann::json tree_to_json(const std::vector<TreeNode>& nodes) {
    nlohmann::json arr = nlohmann::json::array();
    for (const TreeNode& n : nodes) {
        arr.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"value", n.value}});
    }
    return arr;
}

}  // namespace

TrainedClassifier train_linear_svm(const tabular::LabeledDataset& ds, const SvmParams& params,
                                   std::uint64_t seed) {
    require_both_classes(ds, "train_linear_svm");
    if (params.epochs == 0) throw std::invalid_argument("train_linear_svm: epochs must be positive");
    if (params.lambda <= 0.0) throw std::invalid_argument("train_linear_svm: lambda must be positive");

    const std::size_t n = ds.rows();
    const std::size_t d = ds.cols();
    std::vector<double> w(d, 0.0);
    double b = 0.0;

    Rng rng(seed);
    const std::size_t iterations = params.epochs * n;
    for (std::size_t t = 1; t <= iterations; ++t) {
        const std::size_t i = rng.uniform_index(n);
        const double yi = ds.labels[i] == 1 ? 1.0 : -1.0;
        const double eta = 1.0 / (params.lambda * static_cast<double>(t));
        const double* xi = ds.features.row_ptr(i);
        double margin = b;
        for (std::size_t j = 0; j < d; ++j) margin += w[j] * xi[j];
        const double shrink = 1.0 - eta * params.lambda;
        if (yi * margin < 1.0) {
            for (std::size_t j = 0; j < d; ++j) w[j] = shrink * w[j] + eta * yi * xi[j];
            b = shrink * b + eta * yi;
        } else {
            for (std::size_t j = 0; j < d; ++j) w[j] *= shrink;
            b *= shrink;
        }
    }

    TrainedClassifier model;
    model.kind = Kind::LinearSvm;
    model.score_range = ScoreRange::Margin;
    model.input_dim = d;
    model.weights = std::move(w);
    model.bias = b;
    return model;
}

TrainedClassifier train_decision_tree(const tabular::LabeledDataset& ds, const TreeParams& params,
                                      std::uint64_t seed) {
    (void)seed;  // growth is fully deterministic
    if (ds.rows() == 0) throw std::invalid_argument("train_decision_tree: empty dataset");
    if (params.min_leaf == 0) throw std::invalid_argument("train_decision_tree: min_leaf must be positive");

    std::vector<std::size_t> rows(ds.rows());
    std::iota(rows.begin(), rows.end(), 0);

    TrainedClassifier model;
    model.kind = Kind::DecisionTree;
    model.score_range = ScoreRange::Probability;
    model.input_dim = ds.cols();
    grow_gini_tree(ds.features, ds.labels, std::move(rows), 0, params, model.tree);
    return model;
}

TrainedClassifier train_gbt(const tabular::LabeledDataset& ds, const GbtParams& params,
                            std::uint64_t seed) {
    (void)seed;
    require_both_classes(ds, "train_gbt");
    if (params.learning_rate <= 0.0) throw std::invalid_argument("train_gbt: learning_rate must be positive");

    const std::size_t n = ds.rows();
    const auto counts = tabular::class_counts(ds);

    TrainedClassifier model;
    model.kind = Kind::GradientBoostedTrees;
    model.score_range = ScoreRange::Probability;
    model.input_dim = ds.cols();
    model.gbt_base = std::log(static_cast<double>(counts[1]) / static_cast<double>(counts[0]));
    model.gbt_learning_rate = params.learning_rate;

    std::vector<double> score(n, model.gbt_base);
    model.gbt_round_losses.push_back(log_loss(score, ds.labels));

    std::vector<double> residual(n), hessian(n);
    for (std::size_t round = 0; round < params.rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = stable_sigmoid(score[i]);
            residual[i] = static_cast<double>(ds.labels[i]) - p;
            hessian[i] = p * (1.0 - p);
        }
        std::vector<std::size_t> rows(n);
        std::iota(rows.begin(), rows.end(), 0);
        std::vector<TreeNode> tree;
        grow_sse_tree(ds.features, residual, hessian, std::move(rows), 0, params.max_depth, tree);
        for (std::size_t i = 0; i < n; ++i) {
            score[i] += params.learning_rate * tree_score(tree, ds.features.row_ptr(i));
        }
        model.gbt_trees.push_back(std::move(tree));
        model.gbt_round_losses.push_back(log_loss(score, ds.labels));
    }
    return model;
}

TrainedClassifier train_sgd_linear(const tabular::LabeledDataset& ds, const SgdParams& params,
                                   std::uint64_t seed) {
    require_both_classes(ds, "train_sgd_linear");
    if (params.epochs == 0) throw std::invalid_argument("train_sgd_linear: epochs must be positive");
    if (params.learning_rate <= 0.0) {
        throw std::invalid_argument("train_sgd_linear: learning_rate must be positive");
    }

    const std::size_t n = ds.rows();
    const std::size_t d = ds.cols();
    std::vector<double> w(d, 0.0);
    double b = 0.0;

    Rng rng(seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t e = 0; e < params.epochs; ++e) {
        rng.shuffle(order);
        for (std::size_t i : order) {
            const double* xi = ds.features.row_ptr(i);
            double pred = b;
            for (std::size_t j = 0; j < d; ++j) pred += w[j] * xi[j];
            const double err = pred - static_cast<double>(ds.labels[i]);
            const double step = params.learning_rate * err;
            for (std::size_t j = 0; j < d; ++j) w[j] -= step * xi[j];
            b -= step;
        }
    }

    TrainedClassifier model;
    model.kind = Kind::SgdLinear;
    model.score_range = ScoreRange::Probability;
    model.input_dim = d;
    model.weights = std::move(w);
    model.bias = b;
    return model;
}

TrainedClassifier train(Kind kind, const tabular::LabeledDataset& ds,
                        const ClassifierParams& params, std::uint64_t seed) {
    switch (kind) {
        case Kind::LinearSvm: return train_linear_svm(ds, params.svm, seed);
        case Kind::DecisionTree: return train_decision_tree(ds, params.tree, seed);
        case Kind::GradientBoostedTrees: return train_gbt(ds, params.gbt, seed);
        case Kind::SgdLinear: return train_sgd_linear(ds, params.sgd, seed);
    }
    throw std::invalid_argument("train: unknown classifier kind");
}

std::vector<double> predict_scores(const TrainedClassifier& model, const Matrix& features) {
    if (features.cols != model.input_dim) {
        throw std::invalid_argument("predict_scores: expected " + std::to_string(model.input_dim) +
                                    " features, got " + std::to_string(features.cols));
    }
    std::vector<double> scores(features.rows, 0.0);
    switch (model.kind) {
        case Kind::LinearSvm:
            for (std::size_t i = 0; i < features.rows; ++i) {
                const double* row = features.row_ptr(i);
                double s = model.bias;
                for (std::size_t j = 0; j < model.input_dim; ++j) s += model.weights[j] * row[j];
                scores[i] = s;
            }
            break;
        case Kind::SgdLinear:
            for (std::size_t i = 0; i < features.rows; ++i) {
                const double* row = features.row_ptr(i);
                double s = model.bias;
                for (std::size_t j = 0; j < model.input_dim; ++j) s += model.weights[j] * row[j];
                scores[i] = std::clamp(s, 0.0, 1.0);
            }
            break;
        case Kind::DecisionTree:
            for (std::size_t i = 0; i < features.rows; ++i) {
                scores[i] = tree_score(model.tree, features.row_ptr(i));
            }
            break;
        case Kind::GradientBoostedTrees:
            for (std::size_t i = 0; i < features.rows; ++i) {
                const double* row = features.row_ptr(i);
                double f = model.gbt_base;
                for (const auto& tree : model.gbt_trees) {
                    f += model.gbt_learning_rate * tree_score(tree, row);
                }
                scores[i] = stable_sigmoid(f);
            }
            break;
    }
    return scores;
}

std::vector<int> predict_labels(const std::vector<double>& scores, double threshold) {
    std::vector<int> labels(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) labels[i] = scores[i] >= threshold ? 1 : 0;
    return labels;
}

double decision_threshold(const TrainedClassifier& model) {
    return model.score_range == ScoreRange::Margin ? 0.0 : 0.5;
}

std::string kind_name(Kind kind) {
    switch (kind) {
        case Kind::LinearSvm: return "svm";
        case Kind::DecisionTree: return "tree";
        case Kind::GradientBoostedTrees: return "gbt";
        case Kind::SgdLinear: return "sgd";
    }
    return "unknown";
}

Kind kind_from_name(const std::string& name) {
    if (name == "svm") return Kind::LinearSvm;
    if (name == "tree") return Kind::DecisionTree;
    if (name == "gbt") return Kind::GradientBoostedTrees;
    if (name == "sgd") return Kind::SgdLinear;
    throw std::invalid_argument("unknown classifier '" + name + "' (expected svm, tree, gbt, sgd)");
}

std::string classifier_to_json(const TrainedClassifier& model) {
    nlohmann::json j;
    j["kind"] = kind_name(model.kind);
    j["input_dim"] = model.input_dim;
    switch (model.kind) {
        case Kind::LinearSvm:
        case Kind::SgdLinear:
            j["weights"] = model.weights;
            j["bias"] = model.bias;
            break;
        case Kind::DecisionTree:
            j["tree"] = tree_to_json(model.tree);
            break;
        case Kind::GradientBoostedTrees: {
            j["base"] = model.gbt_base;
            j["learning_rate"] = model.gbt_learning_rate;
            nlohmann::json trees = nlohmann::json::array();
            for (const auto& t : model.gbt_trees) trees.push_back(tree_to_json(t));
            j["trees"] = trees;
            break;
        }
    }
    return j.dump();
}

}  // namespace syntab::classifiers
