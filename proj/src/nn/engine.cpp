#include "dicnn/nn/engine.hpp"

#include <algorithm>
#include <cmath>

#include "dicnn/error.hpp"
#include "dicnn/nn/conv.hpp"
#include "dicnn/numkit/parallel.hpp"

namespace dicnn::nn {

PassCounters& pass_counters() noexcept {
    thread_local PassCounters counters;
    return counters;
}

namespace {

using Trace = std::vector<std::vector<double>>;

void check_batch(const DicnnModel& model, const numkit::Tensor& batch) {
    if (batch.rank() != 2 || batch.dim(1) != model.input_width()) {
        throw ShapeError("batch " + numkit::shape_string(batch.shape()) + " does not match model input width " +
                         std::to_string(model.input_width()));
    }
}

Trace make_trace(const DicnnModel& model) {
    Trace t;
    for (const auto& s : model.shapes()) t.emplace_back(s.size());
    return t;
}

ConvGeometry geometry(const LayerSpec& l, const ActShape& in) {
    return {l.in_channels, l.out_channels, in.length, l.kernel_size, l.dilation};
}

void run_forward(const DicnnModel& model, std::span<const double> x, Trace& acts) {
    std::copy(x.begin(), x.end(), acts[0].begin());
    const auto& layers = model.layers();
    const auto& params = model.params();
    const auto& shapes = model.shapes();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& in = acts[i];
        auto& out = acts[i + 1];
        switch (layers[i].kind) {
            case LayerKind::dilated_conv1d:
                conv1d_forward(geometry(layers[i], shapes[i]), in, params[i].weight.values(),
                               params[i].bias.values(), out);
                break;
            case LayerKind::relu:
                for (std::size_t j = 0; j < in.size(); ++j) out[j] = in[j] > 0.0 ? in[j] : 0.0;
                break;
            case LayerKind::global_avg_pool: {
                const auto len = shapes[i].length;
                for (std::size_t c = 0; c < shapes[i].channels; ++c) {
                    double s = 0.0;
                    for (std::size_t t = 0; t < len; ++t) s += in[c * len + t];
                    out[c] = s / static_cast<double>(len);
                }
                break;
            }
            case LayerKind::dense: {
                const auto w = params[i].weight.values();
                const auto b = params[i].bias.values();
                const auto n_in = in.size();
                for (std::size_t o = 0; o < out.size(); ++o) {
                    double s = b[o];
                    const double* wr = w.data() + o * n_in;
                    for (std::size_t j = 0; j < n_in; ++j) s += wr[j] * in[j];
                    out[o] = s;
                }
                break;
            }
            case LayerKind::softmax_head: std::copy(in.begin(), in.end(), out.begin()); break;
        }
    }
}

// Backpropagates `upstream` (dJ/dlogits) through the trace. Parameter
// gradients accumulate into `grad` (flattened, weight then bias per layer);
// the input gradient is written to `grad_x`.
void run_backward(const DicnnModel& model, const Trace& acts, std::vector<double> upstream, std::span<double> grad,
                  std::span<double> grad_x) {
    const auto& layers = model.layers();
    const auto& params = model.params();
    const auto& shapes = model.shapes();

    std::vector<std::size_t> offset(layers.size() + 1, 0);
    for (std::size_t i = 0; i < layers.size(); ++i) offset[i + 1] = offset[i] + params[i].size();

    std::vector<double> g = std::move(upstream);
    std::vector<double> gin;
    for (std::size_t ii = layers.size(); ii-- > 0;) {
        const auto& in = acts[ii];
        gin.assign(in.size(), 0.0);
        auto* gw = grad.data() + offset[ii];
        switch (layers[ii].kind) {
            case LayerKind::softmax_head: gin = g; break;
            case LayerKind::relu:
                for (std::size_t j = 0; j < in.size(); ++j) gin[j] = in[j] > 0.0 ? g[j] : 0.0;
                break;
            case LayerKind::global_avg_pool: {
                const auto len = shapes[ii].length;
                const double inv = 1.0 / static_cast<double>(len);
                for (std::size_t c = 0; c < shapes[ii].channels; ++c)
                    for (std::size_t t = 0; t < len; ++t) gin[c * len + t] = g[c] * inv;
                break;
            }
            case LayerKind::dense: {
                const auto w = params[ii].weight.values();
                const auto n_in = in.size();
                const auto n_out = g.size();
                auto* gb = gw + params[ii].weight.size();
                for (std::size_t o = 0; o < n_out; ++o) {
                    const double go = g[o];
                    gb[o] += go;
                    double* gwr = gw + o * n_in;
                    const double* wr = w.data() + o * n_in;
                    for (std::size_t j = 0; j < n_in; ++j) {
                        gwr[j] += go * in[j];
                        gin[j] += wr[j] * go;
                    }
                }
                break;
            }
            case LayerKind::dilated_conv1d: {
                const auto wsize = params[ii].weight.size();
                conv1d_backward(geometry(layers[ii], shapes[ii]), in, params[ii].weight.values(), g, gin,
                                std::span<double>(gw, wsize), std::span<double>(gw + wsize, params[ii].bias.size()));
                break;
            }
        }
        std::swap(g, gin);
    }
    std::copy(g.begin(), g.end(), grad_x.begin());
}

// Cross-entropy of one logit row against target probabilities; writes
// dJ/dlogits scaled by `scale`.
double cross_entropy(std::span<const double> logits, std::span<const double> target, double scale,
                     std::vector<double>& dlogits) {
    const double m = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double v : logits) z += std::exp(v - m);
    const double lse = m + std::log(z);
    double loss = 0.0;
    dlogits.resize(logits.size());
    for (std::size_t j = 0; j < logits.size(); ++j) {
        loss += target[j] * (lse - logits[j]);
        dlogits[j] = (std::exp(logits[j] - lse) - target[j]) * scale;
    }
    return loss;
}

}  // namespace

numkit::Tensor forward(const DicnnModel& model, const numkit::Tensor& batch) {
    check_batch(model, batch);
    ++pass_counters().forward;
    const auto b_count = batch.dim(0);
    const auto k = model.num_classes();
    std::vector<double> logits(b_count * k);
    DICNN_OMP_PARALLEL
    {
        Trace acts = make_trace(model);
        DICNN_OMP_FOR
        for (std::ptrdiff_t bi = 0; bi < static_cast<std::ptrdiff_t>(b_count); ++bi) {
            const auto b = static_cast<std::size_t>(bi);
            run_forward(model, batch.row(b), acts);
            std::copy(acts.back().begin(), acts.back().end(), logits.begin() + static_cast<std::ptrdiff_t>(b * k));
        }
    }
    numkit::Tensor out({b_count, k}, std::move(logits));
    return out;
}

numkit::Tensor softmax(const numkit::Tensor& logits) {
    if (logits.rank() != 2) throw ShapeError("softmax expects a matrix");
    const auto n = logits.dim(0);
    const auto k = logits.dim(1);
    std::vector<double> out(n * k);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = logits.row(i);
        const double m = *std::max_element(row.begin(), row.end());
        double z = 0.0;
        for (double v : row) z += std::exp(v - m);
        for (std::size_t j = 0; j < k; ++j) out[i * k + j] = std::exp(row[j] - m) / z;
    }
    return numkit::Tensor({n, k}, std::move(out));
}

LossGrads loss_and_grads(const DicnnModel& model, const numkit::Tensor& batch, const numkit::Tensor& targets) {
    check_batch(model, batch);
    const auto b_count = batch.dim(0);
    const auto k = model.num_classes();
    if (targets.rank() != 2 || targets.dim(0) != b_count || targets.dim(1) != k) {
        throw ShapeError("targets " + numkit::shape_string(targets.shape()) + " do not match batch of " +
                         std::to_string(b_count) + " with " + std::to_string(k) + " classes");
    }
    auto& counters = pass_counters();
    ++counters.forward;
    ++counters.backward;

    const auto width = model.input_width();
    const auto p_count = model.parameter_count();
    const double scale = 1.0 / static_cast<double>(b_count);

    std::vector<double> slots(b_count * p_count, 0.0);
    std::vector<double> losses(b_count);
    std::vector<double> grad_x(b_count * width);
    std::vector<double> logits(b_count * k);

    DICNN_OMP_PARALLEL
    {
        Trace acts = make_trace(model);
        std::vector<double> dlogits;
        DICNN_OMP_FOR
        for (std::ptrdiff_t bi = 0; bi < static_cast<std::ptrdiff_t>(b_count); ++bi) {
            const auto b = static_cast<std::size_t>(bi);
            run_forward(model, batch.row(b), acts);
            const auto& z = acts.back();
            std::copy(z.begin(), z.end(), logits.begin() + static_cast<std::ptrdiff_t>(b * k));
            losses[b] = cross_entropy(z, targets.row(b), scale, dlogits);
            run_backward(model, acts, dlogits, std::span<double>(slots).subspan(b * p_count, p_count),
                         std::span<double>(grad_x).subspan(b * width, width));
        }
    }

    double loss = 0.0;
    for (double l : losses) loss += l;
    loss *= scale;
    if (!std::isfinite(loss)) {
        throw NumericError("non-finite loss (" + std::to_string(loss) + ") on a batch of " + std::to_string(b_count));
    }

    std::vector<double> total(p_count, 0.0);
    for (std::size_t b = 0; b < b_count; ++b) {
        const double* s = slots.data() + b * p_count;
        for (std::size_t p = 0; p < p_count; ++p) total[p] += s[p];
    }

    LossGrads out;
    out.loss = loss;
    out.param_grads = model.params();
    unflatten(total, out.param_grads);
    for (const auto& g : out.param_grads) {
        if (!g.weight.all_finite() || !g.bias.all_finite()) throw NumericError("non-finite parameter gradient");
    }
    out.input_grad = numkit::Tensor({b_count, width}, std::move(grad_x));
    out.logits = numkit::Tensor({b_count, k}, std::move(logits));
    return out;
}

std::vector<std::size_t> argmax_rows(const numkit::Tensor& matrix) {
    if (matrix.rank() != 2) throw ShapeError("argmax_rows expects a matrix");
    std::vector<std::size_t> out(matrix.dim(0));
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto row = matrix.row(i);
        out[i] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return out;
}

BatchScore score(const DicnnModel& model, const numkit::Tensor& features, std::span<const std::size_t> labels,
                 std::size_t chunk) {
    check_batch(model, features);
    if (labels.size() != features.dim(0)) throw ShapeError("score: label count does not match rows");
    BatchScore out;
    const auto n = features.dim(0);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::vector<std::size_t> rows;
    for (std::size_t start = 0; start < n; start += chunk) {
        const auto stop = std::min(n, start + chunk);
        rows.clear();
        for (auto r = start; r < stop; ++r) rows.push_back(r);
        const auto logits = forward(model, numkit::take_rows(features, rows));
        const auto pred = argmax_rows(logits);
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const auto row = logits.row(i);
            const double m = *std::max_element(row.begin(), row.end());
            double z = 0.0;
            for (double v : row) z += std::exp(v - m);
            loss_sum += m + std::log(z) - row[labels[start + i]];
            correct += pred[i] == labels[start + i] ? 1 : 0;
            out.predictions.push_back(pred[i]);
        }
    }
    out.mean_loss = loss_sum / static_cast<double>(n);
    out.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    return out;
}

}  // namespace dicnn::nn
