#include "syntab/neural/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace syntab::neural {

AdamState make_adam_state(const std::vector<const Matrix*>& params, const AdamConfig& config) {
    if (config.learning_rate <= 0.0 || config.epsilon <= 0.0 ||
        config.beta1 < 0.0 || config.beta1 >= 1.0 || config.beta2 < 0.0 || config.beta2 >= 1.0) {
        throw std::invalid_argument("make_adam_state: invalid optimizer config");
    }
    AdamState s;
    s.config = config;
    s.m.reserve(params.size());
    s.v.reserve(params.size());
    for (const Matrix* p : params) {
        s.m.emplace_back(p->rows, p->cols);
        s.v.emplace_back(p->rows, p->cols);
    }
    return s;
}

void adam_step(const std::vector<Matrix*>& params, const std::vector<const Matrix*>& grads,
               AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw std::invalid_argument("adam_step: parameter/gradient/state count mismatch");
    }
    ++state.step;
    const AdamConfig& c = state.config;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
    for (std::size_t t = 0; t < params.size(); ++t) {
        Matrix& p = *params[t];
        const Matrix& g = *grads[t];
        Matrix& m = state.m[t];
        Matrix& v = state.v[t];
        if (!p.same_shape(g) || !p.same_shape(m)) {
            throw std::invalid_argument("adam_step: tensor shape mismatch at index " +
                                        std::to_string(t));
        }
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double gi = g.data[i];
            m.data[i] = c.beta1 * m.data[i] + (1.0 - c.beta1) * gi;
            v.data[i] = c.beta2 * v.data[i] + (1.0 - c.beta2) * gi * gi;
            const double m_hat = m.data[i] / bc1;
            const double v_hat = v.data[i] / bc2;
            p.data[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
        }
    }
}

}  // namespace syntab::neural
