#ifndef SYNTAB_MATRIX_HPP
#define SYNTAB_MATRIX_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace syntab {

// Dense row-major matrix of doubles. All numeric state in the toolkit
// (features, weights, gradients, moment buffers) is stored this way.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    Matrix(std::size_t r, std::size_t c, std::vector<double> values)
        : rows(r), cols(c), data(std::move(values)) {
        if (data.size() != rows * cols) {
            throw std::invalid_argument("Matrix: data length " + std::to_string(data.size()) +
                                        " does not match " + std::to_string(rows) + "x" +
                                        std::to_string(cols));
        }
    }

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    double* row_ptr(std::size_t r) { return data.data() + r * cols; }
    const double* row_ptr(std::size_t r) const { return data.data() + r * cols; }

    std::size_t size() const { return data.size(); }
    bool same_shape(const Matrix& other) const {
        return rows == other.rows && cols == other.cols;
    }

    static Matrix zeros(std::size_t r, std::size_t c) { return Matrix(r, c); }
};

inline void require_shape(const Matrix& m, std::size_t rows, std::size_t cols,
                          const char* what) {
    if (m.rows != rows || m.cols != cols) {
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(rows) +
                                    "x" + std::to_string(cols) + ", got " +
                                    std::to_string(m.rows) + "x" + std::to_string(m.cols));
    }
}

} // namespace syntab

#endif
