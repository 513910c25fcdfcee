#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "syntab/matrix.hpp"
#include "syntab/tabular/dataset.hpp"

namespace syntab::classifiers {

enum class Kind { LinearSvm, DecisionTree, GradientBoostedTrees, SgdLinear };
enum class ScoreRange { Margin, Probability };

struct SvmParams {
    double lambda = 1e-4;
    std::size_t epochs = 20;
};

struct TreeParams {
    std::size_t max_depth = 16;
    std::size_t min_leaf = 2;
};

struct GbtParams {
    std::size_t rounds = 100;
    std::size_t max_depth = 4;
    double learning_rate = 0.1;
};

struct SgdParams {
    std::size_t epochs = 20;
    double learning_rate = 0.01;
};

struct ClassifierParams {
    SvmParams svm;
    TreeParams tree;
    GbtParams gbt;
    SgdParams sgd;
};

// feature < 0 marks a leaf; rows go left when x[feature] < threshold.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct TrainedClassifier {
    Kind kind = Kind::LinearSvm;
    ScoreRange score_range = ScoreRange::Margin;
    std::size_t input_dim = 0;

    // linear models
    std::vector<double> weights;
    double bias = 0.0;

    // decision tree
    std::vector<TreeNode> tree;

    // boosted trees
    double gbt_base = 0.0;
    double gbt_learning_rate = 0.0;
    std::vector<std::vector<TreeNode>> gbt_trees;
    // Training log-loss trajectory; index 0 is the prior-only model.
    std::vector<double> gbt_round_losses;
};

// Pegasos-schedule stochastic subgradient descent on the L2-regularized
// hinge loss; the bias rides along as an augmented (regularized) weight.
// Scores are signed margins.
TrainedClassifier train_linear_svm(const tabular::LabeledDataset& ds, const SvmParams& params,
                                   std::uint64_t seed);

// CART with Gini impurity and midpoint thresholds. Split ties go to the
// lower feature index, then the lower threshold; a zero-gain split is still
// taken when the node is impure (this is what lets XOR-style targets be
// learned). Leaf score = positive fraction.
TrainedClassifier train_decision_tree(const tabular::LabeledDataset& ds, const TreeParams& params,
                                      std::uint64_t seed);

// Boosting on the logistic loss: each round fits a regression tree (SSE
// splits) to the residuals t - p with Newton leaf values
// sum(r)/max(sum(p(1-p)), 1e-12) capped to [-4, 4]. Score = sigmoid of the
// accumulated ensemble.
TrainedClassifier train_gbt(const tabular::LabeledDataset& ds, const GbtParams& params,
                            std::uint64_t seed);

// Linear model under squared loss on {0,1} targets, seeded shuffled passes.
// Scores are clamped to [0,1].
TrainedClassifier train_sgd_linear(const tabular::LabeledDataset& ds, const SgdParams& params,
                                   std::uint64_t seed);

TrainedClassifier train(Kind kind, const tabular::LabeledDataset& ds,
                        const ClassifierParams& params, std::uint64_t seed);

std::vector<double> predict_scores(const TrainedClassifier& model, const Matrix& features);

// Ties at the threshold classify as positive.
std::vector<int> predict_labels(const std::vector<double>& scores, double threshold);

// 0 for margin scores, 0.5 for probability scores.
double decision_threshold(const TrainedClassifier& model);

std::string kind_name(Kind kind);
Kind kind_from_name(const std::string& name);

std::string classifier_to_json(const TrainedClassifier& model);

}  // namespace syntab::classifiers
