#pragma once

#include "dicnn/numkit/tensor.hpp"

namespace dicnn::numkit {

// c[i][j] = sum_t a[i][t] * b[t][j], accumulated in ascending t. Rows of c
// are computed in parallel; each element has a single writer, so the result
// is independent of the thread count.
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor transpose(const Tensor& matrix);

Tensor identity(std::size_t n);

}  // namespace dicnn::numkit
