#pragma once

// Serial, loop-literal implementations of the parallel kernels. They exist
// for tests and for the benchmark baseline; nothing on the training path
// calls them.

#include <cstddef>

#include "dicnn/nn/engine.hpp"
#include "dicnn/nn/model.hpp"
#include "dicnn/numkit/tensor.hpp"

namespace dicnn::reference {

numkit::Tensor matmul(const numkit::Tensor& a, const numkit::Tensor& b);

// out[o][s] = bias[o] + sum_c sum_tau R[o][c][tau] * E[c][s - d*tau] for every
// s where all taps fall inside the input; output index is s - (r-1)*d.
numkit::Tensor dilated_conv1d(const numkit::Tensor& input, const numkit::Tensor& kernel, std::size_t dilation,
                              const numkit::Tensor& bias = {});

numkit::Tensor forward(const nn::DicnnModel& model, const numkit::Tensor& batch);

nn::LossGrads loss_and_grads(const nn::DicnnModel& model, const numkit::Tensor& batch, const numkit::Tensor& targets);

}  // namespace dicnn::reference
