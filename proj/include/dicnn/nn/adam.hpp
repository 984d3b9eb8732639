#pragma once

#include <cstdint>
#include <vector>

#include "dicnn/nn/layers.hpp"

namespace dicnn::nn {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::vector<LayerParams> m;  // first moment
    std::vector<LayerParams> v;  // second moment
    std::uint64_t step = 0;
};

// Zero moments shaped like `params`.
AdamState make_adam_state(const std::vector<LayerParams>& params);

// theta -= lr * m_hat / (sqrt(v_hat) + eps) with bias-corrected moments.
void adam_step(std::vector<LayerParams>& params, const std::vector<LayerParams>& grads, AdamState& state,
               const AdamConfig& config);

}  // namespace dicnn::nn
