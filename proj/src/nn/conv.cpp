#include "dicnn/nn/conv.hpp"

#include <algorithm>
#include <string>

#include "dicnn/error.hpp"
#include "dicnn/nn/layers.hpp"

namespace dicnn::nn {

std::size_t ConvGeometry::out_length() const noexcept { return conv_output_length(length, kernel_size, dilation); }

void conv1d_forward(const ConvGeometry& g, std::span<const double> in, std::span<const double> weight,
                    std::span<const double> bias, std::span<double> out) {
    const auto lout = g.out_length();
    const auto r = g.kernel_size;
    for (std::size_t o = 0; o < g.out_channels; ++o) {
        double* dst = out.data() + o * lout;
        std::fill(dst, dst + lout, bias.empty() ? 0.0 : bias[o]);
        for (std::size_t c = 0; c < g.in_channels; ++c) {
            const double* w = weight.data() + (o * g.in_channels + c) * r;
            for (std::size_t tau = 0; tau < r; ++tau) {
                const double wv = w[tau];
                const double* src = in.data() + c * g.length + (r - 1 - tau) * g.dilation;
                for (std::size_t t = 0; t < lout; ++t) dst[t] += wv * src[t];
            }
        }
    }
}

void conv1d_backward(const ConvGeometry& g, std::span<const double> in, std::span<const double> weight,
                     std::span<const double> grad_out, std::span<double> grad_in, std::span<double> grad_weight,
                     std::span<double> grad_bias) {
    const auto lout = g.out_length();
    const auto r = g.kernel_size;
    if (!grad_in.empty()) std::fill(grad_in.begin(), grad_in.end(), 0.0);
    for (std::size_t o = 0; o < g.out_channels; ++o) {
        const double* go = grad_out.data() + o * lout;
        double gb = 0.0;
        for (std::size_t t = 0; t < lout; ++t) gb += go[t];
        grad_bias[o] += gb;
        for (std::size_t c = 0; c < g.in_channels; ++c) {
            const auto widx = (o * g.in_channels + c) * r;
            for (std::size_t tau = 0; tau < r; ++tau) {
                const auto offset = c * g.length + (r - 1 - tau) * g.dilation;
                const double* src = in.data() + offset;
                double gw = 0.0;
                for (std::size_t t = 0; t < lout; ++t) gw += go[t] * src[t];
                grad_weight[widx + tau] += gw;
                if (!grad_in.empty()) {
                    const double wv = weight[widx + tau];
                    double* gi = grad_in.data() + offset;
                    for (std::size_t t = 0; t < lout; ++t) gi[t] += wv * go[t];
                }
            }
        }
    }
}

namespace {

ConvGeometry geometry_for(const numkit::Tensor& input, const numkit::Tensor& kernel, std::size_t dilation) {
    if (input.rank() != 2 || kernel.rank() != 3 || kernel.dim(1) != input.dim(0)) {
        throw ShapeError("dilated_conv1d: input " + numkit::shape_string(input.shape()) + " and kernel " +
                         numkit::shape_string(kernel.shape()) + " are incompatible");
    }
    if (dilation < 1) throw ShapeError("dilated_conv1d: dilation must be >= 1");
    ConvGeometry g{input.dim(0), kernel.dim(0), input.dim(1), kernel.dim(2), dilation};
    if (g.out_length() == 0) {
        throw ShapeError("dilated_conv1d: input length " + std::to_string(g.length) + " too short for kernel " +
                         std::to_string(g.kernel_size) + " at dilation " + std::to_string(dilation) +
                         "; need at least " + std::to_string((g.kernel_size - 1) * dilation + 1));
    }
    return g;
}

}  // namespace

numkit::Tensor dilated_conv1d_forward(const numkit::Tensor& input, const numkit::Tensor& kernel, std::size_t dilation,
                                      const numkit::Tensor& bias) {
    const auto g = geometry_for(input, kernel, dilation);
    if (!bias.empty() && (bias.rank() != 1 || bias.dim(0) != g.out_channels)) {
        throw ShapeError("dilated_conv1d: bias shape " + numkit::shape_string(bias.shape()) + " does not match " +
                         std::to_string(g.out_channels) + " output channels");
    }
    std::vector<double> out(g.out_channels * g.out_length());
    conv1d_forward(g, input.values(), kernel.values(), bias.values(), out);
    return numkit::Tensor({g.out_channels, g.out_length()}, std::move(out));
}

ConvGrads dilated_conv1d_backward(const numkit::Tensor& upstream, const numkit::Tensor& input,
                                  const numkit::Tensor& kernel, std::size_t dilation) {
    const auto g = geometry_for(input, kernel, dilation);
    if (upstream.rank() != 2 || upstream.dim(0) != g.out_channels || upstream.dim(1) != g.out_length()) {
        throw ShapeError("dilated_conv1d_backward: upstream gradient " + numkit::shape_string(upstream.shape()) +
                         " does not match the forward output [" + std::to_string(g.out_channels) + "x" +
                         std::to_string(g.out_length()) + "]");
    }
    std::vector<double> gin(input.size()), gw(kernel.size(), 0.0), gb(g.out_channels, 0.0);
    conv1d_backward(g, input.values(), kernel.values(), upstream.values(), gin, gw, gb);
    return {numkit::Tensor(input.shape(), std::move(gin)), numkit::Tensor(kernel.shape(), std::move(gw)),
            numkit::Tensor({g.out_channels}, std::move(gb))};
}

}  // namespace dicnn::nn
