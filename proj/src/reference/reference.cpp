#include "dicnn/reference/reference.hpp"

#include <cmath>

#include "dicnn/error.hpp"

namespace dicnn::reference {

using numkit::Tensor;
using nn::LayerKind;

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.dim(1) != b.dim(0)) throw ShapeError("reference::matmul: inner dimensions differ");
    const auto m = a.dim(0), k = a.dim(1), n = b.dim(1);
    std::vector<double> c(m * n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t t = 0; t < k; ++t) s += a.at(i, t) * b.at(t, j);
            c[i * n + j] = s;
        }
    }
    return Tensor({m, n}, std::move(c));
}

namespace {

// Activations of one sample as channel-major [C][L] vectors.
using Act = std::vector<std::vector<double>>;

Act conv_literal(const Act& in, const Tensor& w, const Tensor& bias, std::size_t d) {
    const auto cout = w.dim(0), cin = w.dim(1), r = w.dim(2);
    const auto len = in[0].size();
    const auto first = (r - 1) * d;
    Act out(cout, std::vector<double>(len - first));
    for (std::size_t o = 0; o < cout; ++o) {
        for (std::size_t s = first; s < len; ++s) {
            double acc = bias.empty() ? 0.0 : bias[o];
            for (std::size_t c = 0; c < cin; ++c)
                for (std::size_t tau = 0; tau < r; ++tau) acc += w[(o * cin + c) * r + tau] * in[c][s - d * tau];
            out[o][s - first] = acc;
        }
    }
    return out;
}

struct SampleCache {
    std::vector<Act> acts;  // acts[i] is the input of layer i
};

Act run_layer(const nn::LayerSpec& l, const nn::LayerParams& p, const Act& in) {
    switch (l.kind) {
        case LayerKind::dilated_conv1d: return conv_literal(in, p.weight, p.bias, l.dilation);
        case LayerKind::relu: {
            Act out = in;
            for (auto& ch : out)
                for (auto& v : ch) v = v > 0.0 ? v : 0.0;
            return out;
        }
        case LayerKind::global_avg_pool: {
            Act out(in.size(), std::vector<double>(1));
            for (std::size_t c = 0; c < in.size(); ++c) {
                double s = 0.0;
                for (double v : in[c]) s += v;
                out[c][0] = s / static_cast<double>(in[c].size());
            }
            return out;
        }
        case LayerKind::dense: {
            std::vector<double> flat;
            for (const auto& ch : in) flat.insert(flat.end(), ch.begin(), ch.end());
            Act out(l.out_dim, std::vector<double>(1));
            for (std::size_t o = 0; o < l.out_dim; ++o) {
                double s = p.bias[o];
                for (std::size_t j = 0; j < flat.size(); ++j) s += p.weight.at(o, j) * flat[j];
                out[o][0] = s;
            }
            return out;
        }
        case LayerKind::softmax_head: return in;
    }
    return in;
}

SampleCache run_sample(const nn::DicnnModel& model, std::span<const double> x) {
    SampleCache cache;
    cache.acts.push_back(Act{std::vector<double>(x.begin(), x.end())});
    for (std::size_t i = 0; i < model.layers().size(); ++i)
        cache.acts.push_back(run_layer(model.layers()[i], model.params()[i], cache.acts.back()));
    return cache;
}

}  // namespace

Tensor dilated_conv1d(const Tensor& input, const Tensor& kernel, std::size_t dilation, const Tensor& bias) {
    if (input.dim(0) != kernel.dim(1)) throw ShapeError("reference::dilated_conv1d: channel mismatch");
    if (input.dim(1) <= (kernel.dim(2) - 1) * dilation) throw ShapeError("reference::dilated_conv1d: input too short");
    Act in(input.dim(0));
    for (std::size_t c = 0; c < in.size(); ++c) in[c].assign(input.row(c).begin(), input.row(c).end());
    const auto out = conv_literal(in, kernel, bias, dilation);
    std::vector<double> flat;
    for (const auto& ch : out) flat.insert(flat.end(), ch.begin(), ch.end());
    return Tensor({out.size(), out[0].size()}, std::move(flat));
}

Tensor forward(const nn::DicnnModel& model, const Tensor& batch) {
    const auto k = model.num_classes();
    std::vector<double> out;
    for (std::size_t b = 0; b < batch.dim(0); ++b) {
        const auto cache = run_sample(model, batch.row(b));
        for (std::size_t j = 0; j < k; ++j) out.push_back(cache.acts.back()[j][0]);
    }
    return Tensor({batch.dim(0), k}, std::move(out));
}

nn::LossGrads loss_and_grads(const nn::DicnnModel& model, const Tensor& batch, const Tensor& targets) {
    const auto& layers = model.layers();
    const auto& params = model.params();
    const auto bsz = batch.dim(0);
    const auto k = model.num_classes();
    const double inv_b = 1.0 / static_cast<double>(bsz);

    std::vector<std::vector<double>> gw(layers.size()), gb(layers.size());
    for (std::size_t i = 0; i < layers.size(); ++i) {
        gw[i].assign(params[i].weight.size(), 0.0);
        gb[i].assign(params[i].bias.size(), 0.0);
    }
    std::vector<double> grad_x, logits;
    double loss = 0.0;

    for (std::size_t b = 0; b < bsz; ++b) {
        const auto cache = run_sample(model, batch.row(b));
        const auto& z = cache.acts.back();
        double m = z[0][0];
        for (std::size_t j = 1; j < k; ++j) m = std::max(m, z[j][0]);
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) sum += std::exp(z[j][0] - m);
        const double lse = m + std::log(sum);

        Act g(k, std::vector<double>(1));
        for (std::size_t j = 0; j < k; ++j) {
            loss += targets.at(b, j) * (lse - z[j][0]);
            g[j][0] = (std::exp(z[j][0] - lse) - targets.at(b, j)) * inv_b;
            logits.push_back(z[j][0]);
        }

        for (std::size_t ii = layers.size(); ii-- > 0;) {
            const auto& l = layers[ii];
            const auto& in = cache.acts[ii];
            Act gin(in.size(), std::vector<double>(in[0].size(), 0.0));
            switch (l.kind) {
                case LayerKind::softmax_head: gin = g; break;
                case LayerKind::relu:
                    for (std::size_t c = 0; c < in.size(); ++c)
                        for (std::size_t t = 0; t < in[c].size(); ++t) gin[c][t] = in[c][t] > 0.0 ? g[c][t] : 0.0;
                    break;
                case LayerKind::global_avg_pool:
                    for (std::size_t c = 0; c < in.size(); ++c)
                        for (std::size_t t = 0; t < in[c].size(); ++t)
                            gin[c][t] = g[c][0] / static_cast<double>(in[c].size());
                    break;
                case LayerKind::dense: {
                    const auto len = in[0].size();
                    for (std::size_t o = 0; o < l.out_dim; ++o) {
                        gb[ii][o] += g[o][0];
                        for (std::size_t c = 0; c < in.size(); ++c) {
                            for (std::size_t t = 0; t < len; ++t) {
                                const auto j = c * len + t;
                                gw[ii][o * l.in_dim + j] += g[o][0] * in[c][t];
                                gin[c][t] += params[ii].weight.at(o, j) * g[o][0];
                            }
                        }
                    }
                    break;
                }
                case LayerKind::dilated_conv1d: {
                    const auto r = l.kernel_size, d = l.dilation, cin = l.in_channels;
                    const auto first = (r - 1) * d;
                    for (std::size_t o = 0; o < l.out_channels; ++o) {
                        for (std::size_t s = first; s < in[0].size(); ++s) {
                            const double go = g[o][s - first];
                            gb[ii][o] += go;
                            for (std::size_t c = 0; c < cin; ++c) {
                                for (std::size_t tau = 0; tau < r; ++tau) {
                                    const auto widx = (o * cin + c) * r + tau;
                                    gw[ii][widx] += go * in[c][s - d * tau];
                                    gin[c][s - d * tau] += params[ii].weight[widx] * go;
                                }
                            }
                        }
                    }
                    break;
                }
            }
            g = std::move(gin);
        }
        for (double v : g[0]) grad_x.push_back(v);
    }

    nn::LossGrads out;
    out.loss = loss * inv_b;
    out.param_grads = params;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (!params[i].weight.empty()) out.param_grads[i].weight = Tensor(params[i].weight.shape(), gw[i]);
        if (!params[i].bias.empty()) out.param_grads[i].bias = Tensor(params[i].bias.shape(), gb[i]);
    }
    out.input_grad = Tensor({bsz, model.input_width()}, std::move(grad_x));
    out.logits = Tensor({bsz, k}, std::move(logits));
    return out;
}

}  // namespace dicnn::reference
