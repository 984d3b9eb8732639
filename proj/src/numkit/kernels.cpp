#include "dicnn/numkit/kernels.hpp"

#include "dicnn/error.hpp"
#include "dicnn/numkit/parallel.hpp"

namespace dicnn::numkit {

int max_threads() noexcept {
#if defined(DICNN_USE_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
        throw ShapeError("matmul: incompatible shapes " + shape_string(a.shape()) + " and " +
                         shape_string(b.shape()));
    }
    const std::size_t m = a.dim(0);
    const std::size_t k = a.dim(1);
    const std::size_t n = b.dim(1);
    std::vector<double> c(m * n, 0.0);
    const double* pa = a.values().data();
    const double* pb = b.values().data();
    double* pc = c.data();

    // i-t-j order keeps the inner loop contiguous; each c[i][j] still receives
    // its terms in ascending t.
    DICNN_OMP_PARALLEL_FOR
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(m); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double* crow = pc + i * n;
        for (std::size_t t = 0; t < k; ++t) {
            const double av = pa[i * k + t];
            const double* brow = pb + t * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
    return Tensor({m, n}, std::move(c));
}

Tensor transpose(const Tensor& matrix) {
    if (matrix.rank() != 2) throw ShapeError("transpose expects a matrix, got " + shape_string(matrix.shape()));
    const auto rows = matrix.dim(0);
    const auto cols = matrix.dim(1);
    std::vector<double> out(rows * cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) out[j * rows + i] = matrix.at(i, j);
    return Tensor({cols, rows}, std::move(out));
}

Tensor identity(std::size_t n) {
    std::vector<double> out(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) out[i * n + i] = 1.0;
    return Tensor({n, n}, std::move(out));
}

}  // namespace dicnn::numkit
