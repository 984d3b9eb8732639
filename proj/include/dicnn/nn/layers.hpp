#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "dicnn/numkit/tensor.hpp"

namespace dicnn::nn {

enum class LayerKind { dilated_conv1d, relu, global_avg_pool, dense, softmax_head };

std::string_view to_string(LayerKind kind);
LayerKind parse_layer_kind(std::string_view name);

// Static description of one layer. Fields not used by a kind stay zero.
struct LayerSpec {
    LayerKind kind = LayerKind::relu;
    std::size_t kernel_size = 0;
    std::size_t dilation = 0;
    std::size_t in_channels = 0;
    std::size_t out_channels = 0;
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;

    static LayerSpec conv(std::size_t in_channels, std::size_t out_channels, std::size_t kernel_size,
                          std::size_t dilation);
    static LayerSpec relu();
    static LayerSpec global_avg_pool();
    static LayerSpec dense(std::size_t in_dim, std::size_t out_dim);
    static LayerSpec softmax_head();

    std::string describe() const;

    friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

// Learned parameters of one layer; both tensors are empty for parameter-free
// kinds. Conv: weight [out x in x r], bias [out]. Dense: weight [out x in],
// bias [out].
struct LayerParams {
    numkit::Tensor weight;
    numkit::Tensor bias;

    std::size_t size() const noexcept { return weight.size() + bias.size(); }
    friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

// Activation layout between layers: channels x length. Vectors (after pooling
// or dense layers) have length 1.
struct ActShape {
    std::size_t channels = 0;
    std::size_t length = 0;

    std::size_t size() const noexcept { return channels * length; }
    friend bool operator==(const ActShape&, const ActShape&) = default;
};

// Output length of a valid dilated convolution, or 0 if the input is too short.
constexpr std::size_t conv_output_length(std::size_t length, std::size_t kernel_size, std::size_t dilation) {
    const auto span = (kernel_size - 1) * dilation;
    return length > span ? length - span : 0;
}

}  // namespace dicnn::nn
