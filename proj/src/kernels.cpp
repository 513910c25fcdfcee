#include "syntab/neural/kernels.hpp"

#include <algorithm>
#include <string>

namespace syntab::kernels {

namespace {

void check_inner(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": inner dimensions " +
                                    std::to_string(a) + " vs " + std::to_string(b));
    }
}

// The tiled kernels below compute four output rows at a time with the
// accumulators for an 8-column tile held in registers across the whole k
// loop. Each output cell still sums its products in plain ascending-k order,
// exactly like the single-row fallbacks, so every path (tiled, fallback,
// serial, OpenMP) produces bit-identical results.

// Rows [i0, i0+4) of C = A*W (+ bias when non-null).
void gemm_block4(const Matrix& a, const Matrix& w, const double* bias, Matrix& c,
                 std::size_t i0) {
    const std::size_t kc = a.cols;
    const std::size_t n = w.cols;
    const double* a0 = a.row_ptr(i0);
    const double* a1 = a.row_ptr(i0 + 1);
    const double* a2 = a.row_ptr(i0 + 2);
    const double* a3 = a.row_ptr(i0 + 3);
    double* c0 = c.row_ptr(i0);
    double* c1 = c.row_ptr(i0 + 1);
    double* c2 = c.row_ptr(i0 + 2);
    double* c3 = c.row_ptr(i0 + 3);
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
        double acc[4][8];
        for (int t = 0; t < 8; ++t) {
            const double init = bias ? bias[j + t] : 0.0;
            acc[0][t] = init;
            acc[1][t] = init;
            acc[2][t] = init;
            acc[3][t] = init;
        }
        for (std::size_t k = 0; k < kc; ++k) {
            const double* wrow = w.row_ptr(k) + j;
            const double v0 = a0[k];
            const double v1 = a1[k];
            const double v2 = a2[k];
            const double v3 = a3[k];
            for (int t = 0; t < 8; ++t) {
                const double wv = wrow[t];
                acc[0][t] += v0 * wv;
                acc[1][t] += v1 * wv;
                acc[2][t] += v2 * wv;
                acc[3][t] += v3 * wv;
            }
        }
        for (int t = 0; t < 8; ++t) {
            c0[j + t] = acc[0][t];
            c1[j + t] = acc[1][t];
            c2[j + t] = acc[2][t];
            c3[j + t] = acc[3][t];
        }
    }
    if (j < n) {
        const std::size_t tail = n - j;
        double acc[4][8];
        for (std::size_t t = 0; t < tail; ++t) {
            const double init = bias ? bias[j + t] : 0.0;
            acc[0][t] = init;
            acc[1][t] = init;
            acc[2][t] = init;
            acc[3][t] = init;
        }
        for (std::size_t k = 0; k < kc; ++k) {
            const double* wrow = w.row_ptr(k) + j;
            const double v0 = a0[k];
            const double v1 = a1[k];
            const double v2 = a2[k];
            const double v3 = a3[k];
            for (std::size_t t = 0; t < tail; ++t) {
                const double wv = wrow[t];
                acc[0][t] += v0 * wv;
                acc[1][t] += v1 * wv;
                acc[2][t] += v2 * wv;
                acc[3][t] += v3 * wv;
            }
        }
        for (std::size_t t = 0; t < tail; ++t) {
            c0[j + t] = acc[0][t];
            c1[j + t] = acc[1][t];
            c2[j + t] = acc[2][t];
            c3[j + t] = acc[3][t];
        }
    }
}

// Row i of C = A*W (+ bias), for leftover rows after the blocks of four.
void gemm_row(const Matrix& a, const Matrix& w, const double* bias, Matrix& c,
              std::size_t i) {
    const std::size_t kc = a.cols;
    const std::size_t n = w.cols;
    double* crow = c.row_ptr(i);
    const double* arow = a.row_ptr(i);
    if (bias) {
        for (std::size_t j = 0; j < n; ++j) crow[j] = bias[j];
    }
    for (std::size_t k = 0; k < kc; ++k) {
        const double aik = arow[k];
        const double* wrow = w.row_ptr(k);
        for (std::size_t j = 0; j < n; ++j) crow[j] += aik * wrow[j];
    }
}

void gemm_rows(const Matrix& a, const Matrix& w, const double* bias, Matrix& c,
               std::size_t i0, std::size_t i1) {
    std::size_t i = i0;
    for (; i + 4 <= i1; i += 4) gemm_block4(a, w, bias, c, i);
    for (; i < i1; ++i) gemm_row(a, w, bias, c, i);
}

// Rows [i0, i0+4) of C = A^T * B; the four a-columns sit contiguously in each
// a-row, so the k loop reads both operands with unit stride.
void gemm_at_block4(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i0) {
    const std::size_t rows = a.rows;
    const std::size_t n = b.cols;
    double* c0 = c.row_ptr(i0);
    double* c1 = c.row_ptr(i0 + 1);
    double* c2 = c.row_ptr(i0 + 2);
    double* c3 = c.row_ptr(i0 + 3);
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
        double acc[4][8] = {};
        for (std::size_t k = 0; k < rows; ++k) {
            const double* acol = a.row_ptr(k) + i0;
            const double* brow = b.row_ptr(k) + j;
            const double v0 = acol[0];
            const double v1 = acol[1];
            const double v2 = acol[2];
            const double v3 = acol[3];
            for (int t = 0; t < 8; ++t) {
                const double bv = brow[t];
                acc[0][t] += v0 * bv;
                acc[1][t] += v1 * bv;
                acc[2][t] += v2 * bv;
                acc[3][t] += v3 * bv;
            }
        }
        for (int t = 0; t < 8; ++t) {
            c0[j + t] = acc[0][t];
            c1[j + t] = acc[1][t];
            c2[j + t] = acc[2][t];
            c3[j + t] = acc[3][t];
        }
    }
    if (j < n) {
        const std::size_t tail = n - j;
        double acc[4][8] = {};
        for (std::size_t k = 0; k < rows; ++k) {
            const double* acol = a.row_ptr(k) + i0;
            const double* brow = b.row_ptr(k) + j;
            const double v0 = acol[0];
            const double v1 = acol[1];
            const double v2 = acol[2];
            const double v3 = acol[3];
            for (std::size_t t = 0; t < tail; ++t) {
                const double bv = brow[t];
                acc[0][t] += v0 * bv;
                acc[1][t] += v1 * bv;
                acc[2][t] += v2 * bv;
                acc[3][t] += v3 * bv;
            }
        }
        for (std::size_t t = 0; t < tail; ++t) {
            c0[j + t] = acc[0][t];
            c1[j + t] = acc[1][t];
            c2[j + t] = acc[2][t];
            c3[j + t] = acc[3][t];
        }
    }
}

void gemm_at_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i) {
    double* crow = c.row_ptr(i);
    for (std::size_t k = 0; k < a.rows; ++k) {
        const double aki = a.at(k, i);
        const double* brow = b.row_ptr(k);
        for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aki * brow[j];
    }
}

void gemm_at_rows(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i0,
                  std::size_t i1) {
    std::size_t i = i0;
    for (; i + 4 <= i1; i += 4) gemm_at_block4(a, b, c, i);
    for (; i < i1; ++i) gemm_at_row(a, b, c, i);
}

// Row i of C = A * B^T: independent dot-product chains over four b-rows.
void matmul_bt_row(const double* arow, const Matrix& b, double* crow, std::size_t kc) {
    std::size_t j = 0;
    for (; j + 4 <= b.rows; j += 4) {
        const double* b0 = b.row_ptr(j);
        const double* b1 = b.row_ptr(j + 1);
        const double* b2 = b.row_ptr(j + 2);
        const double* b3 = b.row_ptr(j + 3);
        double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
        for (std::size_t k = 0; k < kc; ++k) {
            const double av = arow[k];
            s0 += av * b0[k];
            s1 += av * b1[k];
            s2 += av * b2[k];
            s3 += av * b3[k];
        }
        crow[j] = s0;
        crow[j + 1] = s1;
        crow[j + 2] = s2;
        crow[j + 3] = s3;
    }
    for (; j < b.rows; ++j) {
        const double* brow = b.row_ptr(j);
        double s = 0.0;
        for (std::size_t k = 0; k < kc; ++k) s += arow[k] * brow[k];
        crow[j] = s;
    }
}

// Rows [i0, i0+4) of C = A * B^T as a 4x4 tile of dot products, which shares
// every loaded b-value across the four a-rows.
void matmul_bt_block4(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i0) {
    const std::size_t kc = a.cols;
    const double* a0 = a.row_ptr(i0);
    const double* a1 = a.row_ptr(i0 + 1);
    const double* a2 = a.row_ptr(i0 + 2);
    const double* a3 = a.row_ptr(i0 + 3);
    double* c0 = c.row_ptr(i0);
    double* c1 = c.row_ptr(i0 + 1);
    double* c2 = c.row_ptr(i0 + 2);
    double* c3 = c.row_ptr(i0 + 3);
    std::size_t j = 0;
    for (; j + 4 <= b.rows; j += 4) {
        const double* b0 = b.row_ptr(j);
        const double* b1 = b.row_ptr(j + 1);
        const double* b2 = b.row_ptr(j + 2);
        const double* b3 = b.row_ptr(j + 3);
        double acc[4][4] = {};
        for (std::size_t k = 0; k < kc; ++k) {
            const double va0 = a0[k];
            const double va1 = a1[k];
            const double va2 = a2[k];
            const double va3 = a3[k];
            const double vb0 = b0[k];
            const double vb1 = b1[k];
            const double vb2 = b2[k];
            const double vb3 = b3[k];
            acc[0][0] += va0 * vb0;
            acc[0][1] += va0 * vb1;
            acc[0][2] += va0 * vb2;
            acc[0][3] += va0 * vb3;
            acc[1][0] += va1 * vb0;
            acc[1][1] += va1 * vb1;
            acc[1][2] += va1 * vb2;
            acc[1][3] += va1 * vb3;
            acc[2][0] += va2 * vb0;
            acc[2][1] += va2 * vb1;
            acc[2][2] += va2 * vb2;
            acc[2][3] += va2 * vb3;
            acc[3][0] += va3 * vb0;
            acc[3][1] += va3 * vb1;
            acc[3][2] += va3 * vb2;
            acc[3][3] += va3 * vb3;
        }
        for (int t = 0; t < 4; ++t) {
            c0[j + t] = acc[0][t];
            c1[j + t] = acc[1][t];
            c2[j + t] = acc[2][t];
            c3[j + t] = acc[3][t];
        }
    }
    for (; j < b.rows; ++j) {
        const double* brow = b.row_ptr(j);
        double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
        for (std::size_t k = 0; k < kc; ++k) {
            const double bv = brow[k];
            s0 += a0[k] * bv;
            s1 += a1[k] * bv;
            s2 += a2[k] * bv;
            s3 += a3[k] * bv;
        }
        c0[j] = s0;
        c1[j] = s1;
        c2[j] = s2;
        c3[j] = s3;
    }
}

void matmul_bt_rows(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i0,
                    std::size_t i1) {
    std::size_t i = i0;
    for (; i + 4 <= i1; i += 4) matmul_bt_block4(a, b, c, i);
    for (; i < i1; ++i) matmul_bt_row(a.row_ptr(i), b, c.row_ptr(i), a.cols);
}

} // namespace

namespace serial {

Matrix matmul(const Matrix& a, const Matrix& b) {
    check_inner(a.cols, b.rows, "matmul");
    Matrix c(a.rows, b.cols);
    gemm_rows(a, b, nullptr, c, 0, a.rows);
    return c;
}

Matrix matmul_bt(const Matrix& a, const Matrix& b) {
    check_inner(a.cols, b.cols, "matmul_bt");
    Matrix c(a.rows, b.rows);
    matmul_bt_rows(a, b, c, 0, a.rows);
    return c;
}

Matrix matmul_at(const Matrix& a, const Matrix& b) {
    check_inner(a.rows, b.rows, "matmul_at");
    Matrix c(a.cols, b.cols);
    gemm_at_rows(a, b, c, 0, a.cols);
    return c;
}

Matrix affine(const Matrix& a, const Matrix& w, const Matrix& bias) {
    check_inner(a.cols, w.rows, "affine");
    if (bias.rows != 1 || bias.cols != w.cols) {
        throw std::invalid_argument("affine: bias must be 1 x " + std::to_string(w.cols));
    }
    Matrix c(a.rows, w.cols);
    gemm_rows(a, w, bias.data.data(), c, 0, a.rows);
    return c;
}

Matrix col_sums(const Matrix& a) {
    Matrix c(1, a.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.row_ptr(i);
        for (std::size_t j = 0; j < a.cols; ++j) c.data[j] += arow[j];
    }
    return c;
}

} // namespace serial

// The OpenMP entry points parallelize over blocks of four output rows, the
// same blocks the serial versions walk in order. A cell's value never depends
// on which thread computes it, so thread count cannot change the result.

Matrix matmul(const Matrix& a, const Matrix& b) {
    check_inner(a.cols, b.rows, "matmul");
    Matrix c(a.rows, b.cols);
    const long blocks = static_cast<long>((a.rows + 3) / 4);
#pragma omp parallel for schedule(static)
    for (long bi = 0; bi < blocks; ++bi) {
        const std::size_t i0 = 4 * static_cast<std::size_t>(bi);
        gemm_rows(a, b, nullptr, c, i0, std::min(i0 + 4, a.rows));
    }
    return c;
}

Matrix matmul_bt(const Matrix& a, const Matrix& b) {
    check_inner(a.cols, b.cols, "matmul_bt");
    Matrix c(a.rows, b.rows);
    const long blocks = static_cast<long>((a.rows + 3) / 4);
#pragma omp parallel for schedule(static)
    for (long bi = 0; bi < blocks; ++bi) {
        const std::size_t i0 = 4 * static_cast<std::size_t>(bi);
        matmul_bt_rows(a, b, c, i0, std::min(i0 + 4, a.rows));
    }
    return c;
}

Matrix matmul_at(const Matrix& a, const Matrix& b) {
    check_inner(a.rows, b.rows, "matmul_at");
    Matrix c(a.cols, b.cols);
    const long blocks = static_cast<long>((a.cols + 3) / 4);
#pragma omp parallel for schedule(static)
    for (long bi = 0; bi < blocks; ++bi) {
        const std::size_t i0 = 4 * static_cast<std::size_t>(bi);
        gemm_at_rows(a, b, c, i0, std::min(i0 + 4, a.cols));
    }
    return c;
}

Matrix affine(const Matrix& a, const Matrix& w, const Matrix& bias) {
    check_inner(a.cols, w.rows, "affine");
    if (bias.rows != 1 || bias.cols != w.cols) {
        throw std::invalid_argument("affine: bias must be 1 x " + std::to_string(w.cols));
    }
    Matrix c(a.rows, w.cols);
    const double* bias_ptr = bias.data.data();
    const long blocks = static_cast<long>((a.rows + 3) / 4);
#pragma omp parallel for schedule(static)
    for (long bi = 0; bi < blocks; ++bi) {
        const std::size_t i0 = 4 * static_cast<std::size_t>(bi);
        gemm_rows(a, w, bias_ptr, c, i0, std::min(i0 + 4, a.rows));
    }
    return c;
}

Matrix col_sums(const Matrix& a) {
    Matrix c(1, a.cols);
    const long n = static_cast<long>(a.cols);
    // Parallel over columns: each sum still runs over rows in ascending
    // order, so the result is bit-identical to the serial variant.
#pragma omp parallel for schedule(static)
    for (long j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.rows; ++i) s += a.at(i, static_cast<std::size_t>(j));
        c.data[static_cast<std::size_t>(j)] = s;
    }
    return c;
}

} // namespace syntab::kernels
