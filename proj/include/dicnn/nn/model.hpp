#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dicnn/nn/layers.hpp"

namespace dicnn::nn {

enum class InitScheme {
    he_normal,  // N(0, 2 / fan_in) weights, zero biases
    zeros,
};

struct ArchitectureOptions {
    std::size_t kernel_size = 3;
    std::size_t channels = 32;
    std::vector<std::size_t> dilations{1, 2, 4};
};

// conv(1->C, r, d_0) relu ... conv(C->C, r, d_m) relu, global average pool,
// dense(C->k), softmax head.
std::vector<LayerSpec> default_architecture(std::size_t num_classes, const ArchitectureOptions& options = {});

// dense(F->k) followed by the softmax head; the RFE surrogate.
std::vector<LayerSpec> linear_softmax(std::size_t input_width, std::size_t num_classes);

// Smallest input width the stack of convolutions accepts.
std::size_t minimum_input_width(const std::vector<LayerSpec>& layers);

// Ordered layers with their learned parameters. The input is a single channel
// of `input_width` features; the model emits `num_classes()` logits.
class DicnnModel {
public:
    DicnnModel(std::vector<LayerSpec> layers, std::size_t input_width, std::uint64_t init_seed,
               InitScheme init = InitScheme::he_normal);
    // Restore with explicit parameters (checkpoint load). Shapes are checked.
    DicnnModel(std::vector<LayerSpec> layers, std::size_t input_width, std::uint64_t init_seed,
               std::vector<LayerParams> params);

    const std::vector<LayerSpec>& layers() const noexcept { return layers_; }
    const std::vector<LayerParams>& params() const noexcept { return params_; }
    std::vector<LayerParams>& mutable_params() noexcept { return params_; }

    // shapes()[i] is the input layout of layer i; shapes().back() the output.
    const std::vector<ActShape>& shapes() const noexcept { return shapes_; }

    std::size_t input_width() const noexcept { return input_width_; }
    std::size_t num_classes() const noexcept { return shapes_.back().channels; }
    std::uint64_t init_seed() const noexcept { return init_seed_; }
    const std::string& arch_id() const noexcept { return arch_id_; }
    std::size_t parameter_count() const noexcept;

    bool params_finite() const noexcept;

private:
    std::vector<LayerSpec> layers_;
    std::size_t input_width_;
    std::uint64_t init_seed_;
    std::vector<ActShape> shapes_;
    std::vector<LayerParams> params_;
    std::string arch_id_;
};

// Hash of the input width and the layer list; identifies compatible
// checkpoints.
std::string compute_arch_id(const std::vector<LayerSpec>& layers, std::size_t input_width);

// Validates the chain and returns activation shapes. Throws ShapeError.
std::vector<ActShape> infer_shapes(const std::vector<LayerSpec>& layers, std::size_t input_width);

// Flatten parameters (or gradients) in layer order: weight then bias.
std::vector<double> flatten(const std::vector<LayerParams>& params);
void unflatten(std::span<const double> flat, std::vector<LayerParams>& params);

}  // namespace dicnn::nn
