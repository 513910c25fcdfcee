#include "syntab/neural/gradcheck.hpp"

#include <cmath>
#include <stdexcept>

namespace syntab::neural {

double finite_difference_check(const std::function<double()>& loss,
                               const std::vector<Matrix*>& params,
                               const std::vector<const Matrix*>& analytic_grads,
                               double eps) {
    if (eps <= 0.0 || eps > 1e-2) throw std::invalid_argument("finite_difference_check: eps outside (0, 1e-2]");
    if (params.size() != analytic_grads.size()) {
        throw std::invalid_argument("finite_difference_check: parameter/gradient count mismatch");
    }
    double worst = 0.0;
    for (std::size_t t = 0; t < params.size(); ++t) {
        Matrix& p = *params[t];
        const Matrix& g = *analytic_grads[t];
        if (!p.same_shape(g)) {
            throw std::invalid_argument("finite_difference_check: shape mismatch at tensor " +
                                        std::to_string(t));
        }
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double saved = p.data[i];
            p.data[i] = saved + eps;
            const double up = loss();
            p.data[i] = saved - eps;
            const double down = loss();
            p.data[i] = saved;
            const double fd = (up - down) / (2.0 * eps);
            const double an = g.data[i];
            const double denom = std::max(std::abs(fd) + std::abs(an), 1e-4);
            const double rel = std::abs(fd - an) / denom;
            if (rel > worst) worst = rel;
        }
    }
    return worst;
}

}  // namespace syntab::neural
