#pragma once

#include <span>
#include <vector>

#include "dicnn/data/dataset.hpp"
#include "dicnn/evaluation/metrics.hpp"
#include "dicnn/nn/model.hpp"
#include "dicnn/nn/train.hpp"
#include "dicnn/numkit/rng.hpp"
#include "dicnn/numkit/tensor.hpp"

namespace dicnn::adversarial {

// Per-feature box in standardized units. Empty vectors disable clipping.
struct ClipBounds {
    std::vector<double> low;
    std::vector<double> high;
};

// Column-wise min/max of a feature matrix.
ClipBounds observed_bounds(const numkit::Tensor& features);

struct FgsmConfig {
    double epsilon = 0.05;
    ClipBounds clip;
    double mix_ratio = 0.5;  // share of each training batch replaced by adversarial rows

    // Throws ConfigError.
    void validate(std::size_t width) const;
};

struct AdversarialBatch {
    numkit::Tensor x_adv;
    numkit::Tensor perturbation;  // epsilon * sign(dJ/dx) before clipping
    std::vector<std::size_t> source_indices;
    double epsilon = 0.0;
};

// x_adv = clip(x + eps * sign(dJ/dx)) with sign(0) = 0, using one forward and
// one backward pass over the batch. Clipping keeps each coordinate inside
// [min(low, x), max(high, x)], so an input that already lies outside the
// observed box never moves further than eps.
AdversarialBatch fgsm_perturb(const nn::DicnnModel& model, const numkit::Tensor& x, const numkit::Tensor& targets,
                              const FgsmConfig& config);

struct AugmentedBatch {
    numkit::Tensor x;
    std::vector<std::size_t> perturbed_rows;  // ascending
};

// Replaces round(mix_ratio * B) seeded-chosen rows with their FGSM
// counterparts; labels are unchanged.
AugmentedBatch adversarial_augment(const numkit::Tensor& x, const numkit::Tensor& targets, const nn::DicnnModel& model,
                                   const FgsmConfig& config, numkit::Rng& rng);

nn::BatchHook make_fgsm_hook(FgsmConfig config);

// Clean and FGSM-perturbed evaluation for each epsilon. An epsilon of 0
// reproduces the clean report.
std::vector<evaluation::EvalReport> robustness_sweep(const nn::DicnnModel& model, const data::Dataset& val,
                                                     std::span<const double> epsilons, const ClipBounds& clip,
                                                     std::size_t positive_class, std::size_t chunk = 256);

}  // namespace dicnn::adversarial
