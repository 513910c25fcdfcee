#pragma once

#include <functional>
#include <vector>

#include "syntab/matrix.hpp"

namespace syntab::neural {

// Central-difference verification of analytic gradients. `loss` must be a
// pure function of the current parameter values (freeze dropout masks and
// any other randomness before calling). Each parameter element is perturbed
// by +/- eps in place and restored. Returns the worst relative error
//   |fd - analytic| / max(|fd| + |analytic|, 1e-4)
// over all elements; the floor keeps near-zero gradients from inflating the
// ratio with finite-difference noise.
double finite_difference_check(const std::function<double()>& loss,
                               const std::vector<Matrix*>& params,
                               const std::vector<const Matrix*>& analytic_grads,
                               double eps);

}  // namespace syntab::neural
