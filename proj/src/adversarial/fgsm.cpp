#include "dicnn/adversarial/fgsm.hpp"

#include <algorithm>
#include <cmath>

#include "dicnn/data/preprocess.hpp"
#include "dicnn/error.hpp"
#include "dicnn/evaluation/evaluate.hpp"
#include "dicnn/nn/engine.hpp"

namespace dicnn::adversarial {

ClipBounds observed_bounds(const numkit::Tensor& features) {
    ClipBounds b;
    const auto f = features.dim(1);
    b.low.assign(f, 0.0);
    b.high.assign(f, 0.0);
    for (std::size_t j = 0; j < f; ++j) {
        b.low[j] = b.high[j] = features.at(0, j);
        for (std::size_t i = 1; i < features.dim(0); ++i) {
            b.low[j] = std::min(b.low[j], features.at(i, j));
            b.high[j] = std::max(b.high[j], features.at(i, j));
        }
    }
    return b;
}

void FgsmConfig::validate(std::size_t width) const {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw ConfigError("FGSM epsilon must be a finite value >= 0, got " + std::to_string(epsilon));
    }
    if (!(mix_ratio >= 0.0 && mix_ratio <= 1.0)) throw ConfigError("FGSM mix_ratio must lie in [0, 1]");
    if (clip.low.size() != clip.high.size()) throw ConfigError("FGSM clip bounds differ in length");
    if (!clip.low.empty()) {
        if (clip.low.size() != width) throw ConfigError("FGSM clip bounds do not match the feature width");
        for (std::size_t j = 0; j < width; ++j)
            if (clip.low[j] > clip.high[j]) throw ConfigError("FGSM clip_low exceeds clip_high at feature " + std::to_string(j));
    }
}

AdversarialBatch fgsm_perturb(const nn::DicnnModel& model, const numkit::Tensor& x, const numkit::Tensor& targets,
                              const FgsmConfig& config) {
    config.validate(model.input_width());
    const auto grads = nn::loss_and_grads(model, x, targets);
    const auto g = grads.input_grad.values();
    const auto xv = x.values();
    const auto width = x.dim(1);
    const bool clip = !config.clip.low.empty();

    std::vector<double> delta(g.size()), adv(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double s = g[i] > 0.0 ? 1.0 : (g[i] < 0.0 ? -1.0 : 0.0);
        delta[i] = s * config.epsilon;
        // Untouched coordinates keep their exact bits (including -0.0).
        double v = delta[i] == 0.0 ? xv[i] : xv[i] + delta[i];
        if (clip) {
            const auto j = i % width;
            v = std::clamp(v, std::min(config.clip.low[j], xv[i]), std::max(config.clip.high[j], xv[i]));
        }
        adv[i] = v;
    }
    AdversarialBatch out;
    out.x_adv = numkit::Tensor(x.shape(), std::move(adv));
    out.perturbation = numkit::Tensor(x.shape(), std::move(delta));
    out.source_indices.resize(x.dim(0));
    for (std::size_t i = 0; i < x.dim(0); ++i) out.source_indices[i] = i;
    out.epsilon = config.epsilon;
    return out;
}

AugmentedBatch adversarial_augment(const numkit::Tensor& x, const numkit::Tensor& targets, const nn::DicnnModel& model,
                                   const FgsmConfig& config, numkit::Rng& rng) {
    config.validate(model.input_width());
    const auto b = x.dim(0);
    const auto count = static_cast<std::size_t>(std::floor(config.mix_ratio * static_cast<double>(b) + 0.5));
    AugmentedBatch out{x, {}};
    if (count == 0) return out;

    auto order = numkit::rng_shuffle(rng, b);
    out.perturbed_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(out.perturbed_rows.begin(), out.perturbed_rows.end());

    const auto sub = fgsm_perturb(model, numkit::take_rows(x, out.perturbed_rows),
                                  numkit::take_rows(targets, out.perturbed_rows), config);
    for (std::size_t i = 0; i < count; ++i) {
        const auto src = sub.x_adv.row(i);
        auto dst = out.x.mutable_row(out.perturbed_rows[i]);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
}

nn::BatchHook make_fgsm_hook(FgsmConfig config) {
    return [config = std::move(config)](const nn::DicnnModel& model, const numkit::Tensor& x,
                                        const numkit::Tensor& y, numkit::Rng& rng) {
        return adversarial_augment(x, y, model, config, rng).x;
    };
}

std::vector<evaluation::EvalReport> robustness_sweep(const nn::DicnnModel& model, const data::Dataset& val,
                                                     std::span<const double> epsilons, const ClipBounds& clip,
                                                     std::size_t positive_class, std::size_t chunk) {
    std::vector<evaluation::EvalReport> out;
    const auto n = val.rows();
    const auto targets = data::one_hot(val.labels, model.num_classes());
    for (double eps : epsilons) {
        FgsmConfig cfg{eps, clip, 1.0};
        cfg.validate(model.input_width());
        std::vector<double> adv;
        adv.reserve(val.features.size());
        std::vector<std::size_t> rows;
        for (std::size_t start = 0; start < n; start += chunk) {
            rows.clear();
            for (auto r = start; r < std::min(n, start + chunk); ++r) rows.push_back(r);
            const auto batch = fgsm_perturb(model, numkit::take_rows(val.features, rows),
                                            numkit::take_rows(targets, rows), cfg);
            adv.insert(adv.end(), batch.x_adv.values().begin(), batch.x_adv.values().end());
        }
        const numkit::Tensor x_adv(val.features.shape(), std::move(adv));
        out.push_back(evaluation::evaluate(model, x_adv, val.labels, positive_class, val.class_names, val.source, eps));
    }
    return out;
}

}  // namespace dicnn::adversarial
