#include "syntab/neural/layers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "syntab/neural/kernels.hpp"

namespace syntab::neural {

DenseLayer make_dense(std::size_t in_dim, std::size_t out_dim, double init_stddev, Rng& rng) {
    DenseLayer layer;
    layer.weights = gaussian_init(in_dim, out_dim, init_stddev, rng);
    layer.bias = Matrix(1, out_dim);
    return layer;
}

Matrix dense_forward(const DenseLayer& layer, const Matrix& input) {
    return kernels::affine(input, layer.weights, layer.bias);
}

DenseGrads dense_backward(const DenseLayer& layer, const Matrix& input, const Matrix& upstream) {
    if (input.cols != layer.weights.rows) {
        throw std::invalid_argument("dense_backward: input width " + std::to_string(input.cols) +
                                    " vs layer in-dim " + std::to_string(layer.weights.rows));
    }
    if (upstream.rows != input.rows || upstream.cols != layer.weights.cols) {
        throw std::invalid_argument("dense_backward: upstream shape mismatch");
    }
    DenseGrads g;
    g.input = kernels::matmul_bt(upstream, layer.weights);
    g.weights = kernels::matmul_at(input, upstream);
    g.bias = kernels::col_sums(upstream);
    return g;
}

Matrix leaky_relu(const Matrix& x, double slope) {
    if (slope <= 0.0 || slope >= 1.0) throw std::invalid_argument("leaky_relu: slope outside (0,1)");
    Matrix y(x.rows, x.cols);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = x.data[i];
        y.data[i] = v > 0.0 ? v : slope * v;
    }
    return y;
}

Matrix leaky_relu_backward(const Matrix& x, double slope, const Matrix& upstream) {
    if (!x.same_shape(upstream)) throw std::invalid_argument("leaky_relu_backward: shape mismatch");
    Matrix g(x.rows, x.cols);
    for (std::size_t i = 0; i < x.size(); ++i) {
        g.data[i] = upstream.data[i] * (x.data[i] > 0.0 ? 1.0 : slope);
    }
    return g;
}

Matrix sigmoid(const Matrix& x) {
    Matrix y(x.rows, x.cols);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = x.data[i];
        if (v >= 0.0) {
            y.data[i] = 1.0 / (1.0 + std::exp(-v));
        } else {
            const double e = std::exp(v);
            y.data[i] = e / (1.0 + e);
        }
    }
    return y;
}

Matrix sigmoid_backward(const Matrix& y, const Matrix& upstream) {
    if (!y.same_shape(upstream)) throw std::invalid_argument("sigmoid_backward: shape mismatch");
    Matrix g(y.rows, y.cols);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double v = y.data[i];
        g.data[i] = upstream.data[i] * v * (1.0 - v);
    }
    return g;
}

DropoutResult dropout(const Matrix& x, double rate, Rng& rng, bool training) {
    if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout: rate outside [0,1)");
    DropoutResult r;
    r.mask = Matrix(x.rows, x.cols);
    r.output = Matrix(x.rows, x.cols);
    if (!training || rate == 0.0) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            r.mask.data[i] = 1.0;
            r.output.data[i] = x.data[i];
        }
        return r;
    }
    const double scale = 1.0 / (1.0 - rate);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double m = rng.bernoulli(rate) ? 0.0 : scale;
        r.mask.data[i] = m;
        r.output.data[i] = x.data[i] * m;
    }
    return r;
}

Matrix dropout_backward(const Matrix& mask, const Matrix& upstream) {
    if (!mask.same_shape(upstream)) throw std::invalid_argument("dropout_backward: shape mismatch");
    Matrix g(mask.rows, mask.cols);
    for (std::size_t i = 0; i < mask.size(); ++i) g.data[i] = upstream.data[i] * mask.data[i];
    return g;
}

BceResult bce_loss(const Matrix& pred, const Matrix& target) {
    if (!pred.same_shape(target)) throw std::invalid_argument("bce_loss: shape mismatch");
    if (pred.size() == 0) throw std::invalid_argument("bce_loss: empty input");
    constexpr double kEps = 1e-7;
    const double inv_n = 1.0 / static_cast<double>(pred.size());
    BceResult r;
    r.grad = Matrix(pred.rows, pred.cols);
    double total = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double p = pred.data[i];
        const double t = target.data[i];
        const double pc = p < kEps ? kEps : (p > 1.0 - kEps ? 1.0 - kEps : p);
        total += -(t * std::log(pc) + (1.0 - t) * std::log(1.0 - pc));
        if (p <= kEps || p >= 1.0 - kEps) {
            r.grad.data[i] = 0.0;
        } else {
            r.grad.data[i] = (pc - t) / (pc * (1.0 - pc)) * inv_n;
        }
    }
    r.loss = total * inv_n;
    return r;
}

Matrix gaussian_init(std::size_t rows, std::size_t cols, double stddev, Rng& rng) {
    if (stddev <= 0.0) throw std::invalid_argument("gaussian_init: stddev must be positive");
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data[i] = rng.normal(stddev);
    return m;
}

EmbeddingTable make_embedding(std::size_t num_labels, std::size_t embed_dim,
                              double init_stddev, Rng& rng) {
    return EmbeddingTable{gaussian_init(num_labels, embed_dim, init_stddev, rng)};
}

Matrix embedding_forward(const EmbeddingTable& table, const std::vector<int>& labels) {
    Matrix out(labels.size(), table.entries.cols);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int lbl = labels[i];
        if (lbl < 0 || static_cast<std::size_t>(lbl) >= table.entries.rows) {
            throw std::invalid_argument("embedding_forward: label " + std::to_string(lbl) +
                                        " out of range");
        }
        const double* src = table.entries.row_ptr(static_cast<std::size_t>(lbl));
        double* dst = out.row_ptr(i);
        for (std::size_t j = 0; j < table.entries.cols; ++j) dst[j] = src[j];
    }
    return out;
}

Matrix embedding_backward(const EmbeddingTable& table, const std::vector<int>& labels,
                          const Matrix& upstream) {
    if (upstream.rows != labels.size() || upstream.cols != table.entries.cols) {
        throw std::invalid_argument("embedding_backward: upstream shape mismatch");
    }
    Matrix grad(table.entries.rows, table.entries.cols);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        double* dst = grad.row_ptr(static_cast<std::size_t>(labels[i]));
        const double* src = upstream.row_ptr(i);
        for (std::size_t j = 0; j < upstream.cols; ++j) dst[j] += src[j];
    }
    return grad;
}

}  // namespace syntab::neural
