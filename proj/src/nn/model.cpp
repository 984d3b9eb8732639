#include "dicnn/nn/model.hpp"

#include <algorithm>
#include <cmath>

#include "dicnn/error.hpp"
#include "dicnn/io.hpp"
#include "dicnn/numkit/rng.hpp"

namespace dicnn::nn {

std::vector<LayerSpec> default_architecture(std::size_t num_classes, const ArchitectureOptions& options) {
    if (options.dilations.empty()) throw ConfigError("architecture needs at least one dilated convolution");
    std::vector<LayerSpec> layers;
    std::size_t in = 1;
    for (auto d : options.dilations) {
        layers.push_back(LayerSpec::conv(in, options.channels, options.kernel_size, d));
        layers.push_back(LayerSpec::relu());
        in = options.channels;
    }
    layers.push_back(LayerSpec::global_avg_pool());
    layers.push_back(LayerSpec::dense(options.channels, num_classes));
    layers.push_back(LayerSpec::softmax_head());
    return layers;
}

std::vector<LayerSpec> linear_softmax(std::size_t input_width, std::size_t num_classes) {
    return {LayerSpec::dense(input_width, num_classes), LayerSpec::softmax_head()};
}

std::size_t minimum_input_width(const std::vector<LayerSpec>& layers) {
    std::size_t span = 0;
    for (const auto& l : layers) {
        if (l.kind == LayerKind::dilated_conv1d) span += (l.kernel_size - 1) * l.dilation;
    }
    return span + 1;
}

std::vector<ActShape> infer_shapes(const std::vector<LayerSpec>& layers, std::size_t input_width) {
    if (layers.empty()) throw ShapeError("model has no layers");
    if (input_width == 0) throw ShapeError("model input width must be positive");
    std::vector<ActShape> shapes{{1, input_width}};
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        const auto cur = shapes.back();
        const auto where = "layer " + std::to_string(i) + " " + l.describe() + ": ";
        switch (l.kind) {
            case LayerKind::dilated_conv1d: {
                if (l.kernel_size < 1 || l.dilation < 1 || l.out_channels < 1) {
                    throw ShapeError(where + "kernel size, dilation and channels must be >= 1");
                }
                if (l.in_channels != cur.channels) {
                    throw ShapeError(where + "expects " + std::to_string(l.in_channels) + " input channels, got " +
                                     std::to_string(cur.channels));
                }
                const auto lout = conv_output_length(cur.length, l.kernel_size, l.dilation);
                if (lout == 0) {
                    throw ShapeError(where + "input length " + std::to_string(cur.length) +
                                     " too short; need at least " +
                                     std::to_string((l.kernel_size - 1) * l.dilation + 1) + " (model needs width >= " +
                                     std::to_string(minimum_input_width(layers)) + ")");
                }
                shapes.push_back({l.out_channels, lout});
                break;
            }
            case LayerKind::relu: shapes.push_back(cur); break;
            case LayerKind::global_avg_pool: shapes.push_back({cur.channels, 1}); break;
            case LayerKind::dense:
                if (l.in_dim != cur.size() || l.out_dim < 1) {
                    throw ShapeError(where + "expects input size " + std::to_string(l.in_dim) + ", got " +
                                     std::to_string(cur.size()));
                }
                shapes.push_back({l.out_dim, 1});
                break;
            case LayerKind::softmax_head:
                if (i + 1 != layers.size()) throw ShapeError(where + "softmax head must be the last layer");
                if (cur.length != 1 || cur.channels < 2) {
                    throw ShapeError(where + "softmax head needs a vector of at least 2 logits");
                }
                shapes.push_back(cur);
                break;
        }
    }
    if (layers.back().kind != LayerKind::softmax_head) throw ShapeError("model must end with a softmax head");
    return shapes;
}

std::string compute_arch_id(const std::vector<LayerSpec>& layers, std::size_t input_width) {
    std::string canonical = "input=" + std::to_string(input_width);
    for (const auto& l : layers) canonical += ";" + l.describe();
    return io::sha256_hex(canonical).substr(0, 16);
}

namespace {

std::vector<LayerParams> init_params(const std::vector<LayerSpec>& layers, std::uint64_t seed, InitScheme init) {
    numkit::Rng rng(numkit::derive_seed(seed, "init"));
    std::vector<LayerParams> params(layers.size());
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        numkit::Shape wshape;
        std::size_t fan_in = 0;
        if (l.kind == LayerKind::dilated_conv1d) {
            wshape = {l.out_channels, l.in_channels, l.kernel_size};
            fan_in = l.in_channels * l.kernel_size;
        } else if (l.kind == LayerKind::dense) {
            wshape = {l.out_dim, l.in_dim};
            fan_in = l.in_dim;
        } else {
            continue;
        }
        std::vector<double> w(numkit::element_count(wshape), 0.0);
        if (init == InitScheme::he_normal) {
            const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
            for (auto& v : w) v = scale * rng.normal();
        }
        params[i].weight = numkit::Tensor(wshape, std::move(w));
        params[i].bias = numkit::Tensor::zeros({wshape[0]});
    }
    return params;
}

}  // namespace

DicnnModel::DicnnModel(std::vector<LayerSpec> layers, std::size_t input_width, std::uint64_t init_seed,
                       InitScheme init)
    : DicnnModel(layers, input_width, init_seed, init_params(layers, init_seed, init)) {}

DicnnModel::DicnnModel(std::vector<LayerSpec> layers, std::size_t input_width, std::uint64_t init_seed,
                       std::vector<LayerParams> params)
    : layers_(std::move(layers)),
      input_width_(input_width),
      init_seed_(init_seed),
      shapes_(infer_shapes(layers_, input_width)),
      params_(std::move(params)),
      arch_id_(compute_arch_id(layers_, input_width)) {
    if (params_.size() != layers_.size()) throw ShapeError("parameter list does not match layer count");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const auto& l = layers_[i];
        numkit::Shape w, b;
        if (l.kind == LayerKind::dilated_conv1d) {
            w = {l.out_channels, l.in_channels, l.kernel_size};
            b = {l.out_channels};
        } else if (l.kind == LayerKind::dense) {
            w = {l.out_dim, l.in_dim};
            b = {l.out_dim};
        }
        const auto& p = params_[i];
        const bool ok = w.empty() ? (p.weight.empty() && p.bias.empty())
                                  : (p.weight.shape() == w && p.bias.shape() == b);
        if (!ok) {
            throw ShapeError("layer " + std::to_string(i) + " " + l.describe() + ": parameter shapes " +
                             numkit::shape_string(p.weight.shape()) + "/" + numkit::shape_string(p.bias.shape()) +
                             " do not match the layer");
        }
    }
}

std::size_t DicnnModel::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.size();
    return n;
}

bool DicnnModel::params_finite() const noexcept {
    for (const auto& p : params_) {
        if (!p.weight.all_finite() || !p.bias.all_finite()) return false;
    }
    return true;
}

std::vector<double> flatten(const std::vector<LayerParams>& params) {
    std::vector<double> out;
    for (const auto& p : params) {
        out.insert(out.end(), p.weight.values().begin(), p.weight.values().end());
        out.insert(out.end(), p.bias.values().begin(), p.bias.values().end());
    }
    return out;
}

void unflatten(std::span<const double> flat, std::vector<LayerParams>& params) {
    std::size_t pos = 0;
    for (auto& p : params) {
        for (auto* t : {&p.weight, &p.bias}) {
            auto dst = t->mutable_values();
            if (pos + dst.size() > flat.size()) throw ShapeError("unflatten: flat vector too short");
            std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), dst.size(), dst.begin());
            pos += dst.size();
        }
    }
    if (pos != flat.size()) throw ShapeError("unflatten: flat vector too long");
}

}  // namespace dicnn::nn
