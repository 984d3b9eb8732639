#include "dicnn/nn/adam.hpp"

#include <cmath>

#include "dicnn/error.hpp"

namespace dicnn::nn {

namespace {

LayerParams zeros_like(const LayerParams& p) {
    LayerParams z;
    if (!p.weight.empty()) z.weight = numkit::Tensor::zeros(p.weight.shape());
    if (!p.bias.empty()) z.bias = numkit::Tensor::zeros(p.bias.shape());
    return z;
}

}  // namespace

AdamState make_adam_state(const std::vector<LayerParams>& params) {
    AdamState s;
    for (const auto& p : params) {
        s.m.push_back(zeros_like(p));
        s.v.push_back(zeros_like(p));
    }
    return s;
}

void adam_step(std::vector<LayerParams>& params, const std::vector<LayerParams>& grads, AdamState& state,
               const AdamConfig& config) {
    if (grads.size() != params.size() || state.m.size() != params.size()) {
        throw ShapeError("adam_step: parameter, gradient and state layouts differ");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(config.beta1, t);
    const double c2 = 1.0 - std::pow(config.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto update = [&](numkit::Tensor& theta, const numkit::Tensor& g, numkit::Tensor& m, numkit::Tensor& v) {
            if (theta.empty()) return;
            if (g.shape() != theta.shape()) throw ShapeError("adam_step: gradient shape mismatch");
            auto th = theta.mutable_values();
            auto mm = m.mutable_values();
            auto vv = v.mutable_values();
            const auto gg = g.values();
            for (std::size_t j = 0; j < th.size(); ++j) {
                mm[j] = config.beta1 * mm[j] + (1.0 - config.beta1) * gg[j];
                vv[j] = config.beta2 * vv[j] + (1.0 - config.beta2) * gg[j] * gg[j];
                const double m_hat = mm[j] / c1;
                const double v_hat = vv[j] / c2;
                th[j] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
            }
        };
        update(params[i].weight, grads[i].weight, state.m[i].weight, state.v[i].weight);
        update(params[i].bias, grads[i].bias, state.m[i].bias, state.v[i].bias);
    }
}

}  // namespace dicnn::nn
