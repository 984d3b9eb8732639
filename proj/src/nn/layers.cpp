#include "dicnn/nn/layers.hpp"

#include <sstream>

#include "dicnn/error.hpp"

namespace dicnn::nn {

std::string_view to_string(LayerKind kind) {
    switch (kind) {
        case LayerKind::dilated_conv1d: return "dilated_conv1d";
        case LayerKind::relu: return "relu";
        case LayerKind::global_avg_pool: return "global_avg_pool";
        case LayerKind::dense: return "dense";
        case LayerKind::softmax_head: return "softmax_head";
    }
    return "unknown";
}

LayerKind parse_layer_kind(std::string_view name) {
    for (auto k : {LayerKind::dilated_conv1d, LayerKind::relu, LayerKind::global_avg_pool, LayerKind::dense,
                   LayerKind::softmax_head}) {
        if (to_string(k) == name) return k;
    }
    throw DataError("unknown layer kind '" + std::string(name) + "'");
}

LayerSpec LayerSpec::conv(std::size_t in_channels, std::size_t out_channels, std::size_t kernel_size,
                          std::size_t dilation) {
    LayerSpec s;
    s.kind = LayerKind::dilated_conv1d;
    s.in_channels = in_channels;
    s.out_channels = out_channels;
    s.kernel_size = kernel_size;
    s.dilation = dilation;
    return s;
}

LayerSpec LayerSpec::relu() { return LayerSpec{}; }

LayerSpec LayerSpec::global_avg_pool() {
    LayerSpec s;
    s.kind = LayerKind::global_avg_pool;
    return s;
}

LayerSpec LayerSpec::dense(std::size_t in_dim, std::size_t out_dim) {
    LayerSpec s;
    s.kind = LayerKind::dense;
    s.in_dim = in_dim;
    s.out_dim = out_dim;
    return s;
}

LayerSpec LayerSpec::softmax_head() {
    LayerSpec s;
    s.kind = LayerKind::softmax_head;
    return s;
}

std::string LayerSpec::describe() const {
    std::ostringstream out;
    out << to_string(kind);
    switch (kind) {
        case LayerKind::dilated_conv1d:
            out << '(' << in_channels << "->" << out_channels << ",r=" << kernel_size << ",d=" << dilation << ')';
            break;
        case LayerKind::dense: out << '(' << in_dim << "->" << out_dim << ')'; break;
        default: break;
    }
    return out.str();
}

}  // namespace dicnn::nn
