#pragma once

#include <cstddef>
#include <span>

#include "dicnn/numkit/tensor.hpp"

namespace dicnn::nn {

// Valid-mode dilated convolution with the kernel indexed backwards:
//
//   out[o][t] = bias[o] + sum_c sum_tau W[o][c][tau] * in[c][s - d*tau],
//   s = t + (r-1)*d,  t in [0, L - (r-1)*d)
//
// Dilation 1 is ordinary (flipped-kernel) convolution.
struct ConvGeometry {
    std::size_t in_channels;
    std::size_t out_channels;
    std::size_t length;
    std::size_t kernel_size;
    std::size_t dilation;

    std::size_t out_length() const noexcept;
};

// Raw kernels on contiguous buffers. `out` is overwritten.
void conv1d_forward(const ConvGeometry& g, std::span<const double> in, std::span<const double> weight,
                    std::span<const double> bias, std::span<double> out);

// Accumulates into grad_weight and grad_bias; overwrites grad_in (which may be
// empty when the input gradient is not needed).
void conv1d_backward(const ConvGeometry& g, std::span<const double> in, std::span<const double> weight,
                     std::span<const double> grad_out, std::span<double> grad_in, std::span<double> grad_weight,
                     std::span<double> grad_bias);

// Tensor entry points. input [C x L], kernel [O x C x r], optional bias [O].
numkit::Tensor dilated_conv1d_forward(const numkit::Tensor& input, const numkit::Tensor& kernel,
                                      std::size_t dilation, const numkit::Tensor& bias = {});

struct ConvGrads {
    numkit::Tensor input;   // [C x L]
    numkit::Tensor kernel;  // [O x C x r]
    numkit::Tensor bias;    // [O]
};

ConvGrads dilated_conv1d_backward(const numkit::Tensor& upstream, const numkit::Tensor& input,
                                  const numkit::Tensor& kernel, std::size_t dilation);

}  // namespace dicnn::nn
