#pragma once

#include <cstddef>
#include <vector>

#include "syntab/matrix.hpp"
#include "syntab/rng.hpp"

namespace syntab::neural {

// Fully connected layer, weights (in x out), bias (1 x out).
struct DenseLayer {
    Matrix weights;
    Matrix bias;
};

// Weights ~ N(0, stddev^2) from the given stream, bias zero.
DenseLayer make_dense(std::size_t in_dim, std::size_t out_dim, double init_stddev, Rng& rng);

// input (n x in) -> input * W + bias, row-broadcast.
Matrix dense_forward(const DenseLayer& layer, const Matrix& input);

struct DenseGrads {
    Matrix input;
    Matrix weights;
    Matrix bias;
};

// upstream (n x out) -> gradients wrt input, weights, bias.
DenseGrads dense_backward(const DenseLayer& layer, const Matrix& input, const Matrix& upstream);

// y = x if x > 0 else slope * x. The derivative at exactly 0 is taken as slope.
Matrix leaky_relu(const Matrix& x, double slope);
Matrix leaky_relu_backward(const Matrix& x, double slope, const Matrix& upstream);

// Numerically stable logistic; saturates cleanly for |x| up to a few hundred.
Matrix sigmoid(const Matrix& x);
// Takes the forward output y, not the pre-activation.
Matrix sigmoid_backward(const Matrix& y, const Matrix& upstream);

// Inverted dropout: during training each element is zeroed with probability
// `rate` and survivors are scaled by 1/(1-rate), so inference is an identity.
// The mask stores the per-element scale factor (0 or 1/(1-rate)); with
// training=false the mask is all ones and the rng is not consumed.
struct DropoutResult {
    Matrix output;
    Matrix mask;
};
DropoutResult dropout(const Matrix& x, double rate, Rng& rng, bool training);
Matrix dropout_backward(const Matrix& mask, const Matrix& upstream);

// Mean binary cross-entropy over all elements. Predictions are clamped to
// [1e-7, 1-1e-7] before the logs; the gradient is the derivative of the
// clamped loss, i.e. zero where the clamp is active.
struct BceResult {
    double loss;
    Matrix grad;
};
BceResult bce_loss(const Matrix& pred, const Matrix& target);

Matrix gaussian_init(std::size_t rows, std::size_t cols, double stddev, Rng& rng);

// Learned lookup table mapping class labels {0,1} to dense rows.
struct EmbeddingTable {
    Matrix entries;  // num_labels x embed_dim
};

EmbeddingTable make_embedding(std::size_t num_labels, std::size_t embed_dim,
                              double init_stddev, Rng& rng);

// labels[i] selects the output row; every label must be < num_labels.
Matrix embedding_forward(const EmbeddingTable& table, const std::vector<int>& labels);

// Returns the gradient wrt the table entries: upstream rows accumulated
// into their label's row, in input order.
Matrix embedding_backward(const EmbeddingTable& table, const std::vector<int>& labels,
                          const Matrix& upstream);

}  // namespace syntab::neural
