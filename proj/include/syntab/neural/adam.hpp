#pragma once

#include <cstdint>
#include <vector>

#include "syntab/matrix.hpp"

namespace syntab::neural {

struct AdamConfig {
    double learning_rate = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// One state covers a whole parameter group: moment buffers are kept per
// tensor, the step counter is shared, as usual.
struct AdamState {
    AdamConfig config;
    std::vector<Matrix> m;
    std::vector<Matrix> v;
    std::uint64_t step = 0;
};

AdamState make_adam_state(const std::vector<const Matrix*>& params, const AdamConfig& config = {});

// Bias-corrected update: p -= lr * m_hat / (sqrt(v_hat) + eps).
void adam_step(const std::vector<Matrix*>& params, const std::vector<const Matrix*>& grads,
               AdamState& state);

}  // namespace syntab::neural
