// Times the OpenMP kernels against their serial reference and verifies the
// outputs stay bit-identical while doing so. Usage: bench_kernels [n] [reps]
#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "syntab/matrix.hpp"
#include "syntab/neural/kernels.hpp"
#include "syntab/rng.hpp"

using syntab::Matrix;
using syntab::Rng;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data[i] = rng.uniform() * 2.0 - 1.0;
    return m;
}

template <typename F>
double time_ms(F&& fn, int reps) {
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

bool bit_equal(const Matrix& a, const Matrix& b) {
    return a.same_shape(b) &&
           std::memcmp(a.data.data(), b.data.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t n = argc > 1 ? std::stoul(argv[1]) : 512;
    const int reps = argc > 2 ? std::stoi(argv[2]) : 5;

#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP disabled)\n");
#endif
    std::printf("size: %zu x %zu, reps: %d\n\n", n, n, reps);

    Rng rng(20240717);
    const Matrix a = random_matrix(n, n, rng);
    const Matrix b = random_matrix(n, n, rng);
    const Matrix bias = random_matrix(1, n, rng);

    struct Row {
        const char* name;
        Matrix serial;
        Matrix parallel;
        double t_serial;
        double t_parallel;
    };
    namespace k = syntab::kernels;
    Row rows[] = {
        {"matmul", k::serial::matmul(a, b), k::matmul(a, b),
         time_ms([&] { k::serial::matmul(a, b); }, reps), time_ms([&] { k::matmul(a, b); }, reps)},
        {"matmul_bt", k::serial::matmul_bt(a, b), k::matmul_bt(a, b),
         time_ms([&] { k::serial::matmul_bt(a, b); }, reps), time_ms([&] { k::matmul_bt(a, b); }, reps)},
        {"matmul_at", k::serial::matmul_at(a, b), k::matmul_at(a, b),
         time_ms([&] { k::serial::matmul_at(a, b); }, reps), time_ms([&] { k::matmul_at(a, b); }, reps)},
        {"affine", k::serial::affine(a, b, bias), k::affine(a, b, bias),
         time_ms([&] { k::serial::affine(a, b, bias); }, reps), time_ms([&] { k::affine(a, b, bias); }, reps)},
        {"col_sums", k::serial::col_sums(a), k::col_sums(a),
         time_ms([&] { k::serial::col_sums(a); }, reps), time_ms([&] { k::col_sums(a); }, reps)},
    };

    std::printf("%-10s %12s %12s %9s %6s\n", "kernel", "serial ms", "parallel ms", "speedup", "match");
    bool all_match = true;
    for (const Row& r : rows) {
        const bool match = bit_equal(r.serial, r.parallel);
        all_match = all_match && match;
        std::printf("%-10s %12.3f %12.3f %8.2fx %6s\n", r.name, r.t_serial, r.t_parallel,
                    r.t_serial / r.t_parallel, match ? "yes" : "NO");
    }
    if (!all_match) {
        std::printf("\nFAIL: parallel kernels diverged from the serial reference\n");
        return 1;
    }
    return 0;
}
