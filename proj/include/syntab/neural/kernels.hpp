#ifndef SYNTAB_NEURAL_KERNELS_HPP
#define SYNTAB_NEURAL_KERNELS_HPP

#include "syntab/matrix.hpp"

namespace syntab::kernels {

// Matrix kernels behind every dense-layer forward/backward pass. The default
// entry points are OpenMP-parallel over output rows; kernels::serial holds
// the plain-loop reference implementations. Both variants accumulate each
// output element in the same k-order, so results are bit-identical and the
// serial versions double as the test oracle (see tests/test_kernels.cpp and
// tools/bench_kernels.cpp).

// C = A(n,k) * B(k,m)
Matrix matmul(const Matrix& a, const Matrix& b);

// C = A(n,k) * B(m,k)^T
Matrix matmul_bt(const Matrix& a, const Matrix& b);

// C = A(k,n)^T * B(k,m)
Matrix matmul_at(const Matrix& a, const Matrix& b);

// C = A(n,k) * W(k,m) + bias(1,m) broadcast over rows
Matrix affine(const Matrix& a, const Matrix& w, const Matrix& bias);

// Column sums of A as a 1 x cols matrix.
Matrix col_sums(const Matrix& a);

namespace serial {
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_bt(const Matrix& a, const Matrix& b);
Matrix matmul_at(const Matrix& a, const Matrix& b);
Matrix affine(const Matrix& a, const Matrix& w, const Matrix& bias);
Matrix col_sums(const Matrix& a);
} // namespace serial

} // namespace syntab::kernels

#endif
